#include <cmath>
#include <limits>

#include "doctest.h"
#include "illposed/linalg.hpp"

using namespace illposed;

namespace {

Matrix random_matrix(RandomSource& src, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = src.gaussian();
    return m;
}

double reconstruction_error(const Matrix& a, const SingularSystem& s) {
    Matrix recon(a.rows(), a.cols());
    for (std::size_t k = 0; k < s.rank; ++k)
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j)
                recon(i, j) += s.sigma[k] * s.U(i, k) * s.V(j, k);
    double err = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double d = recon(i, j) - a(i, j);
            err += d * d;
        }
    return std::sqrt(err);
}

}  // namespace

TEST_SUITE_BEGIN("linalg");

TEST_CASE("svd of the identity") {
    const SingularSystem s = svd(Matrix::identity(2));
    REQUIRE(s.rank == 2);
    CHECK(s.sigma[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.sigma[1] == doctest::Approx(1.0).epsilon(1e-12));
    // columns are +-unit vectors in some order
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(std::abs(dot(s.u_col(k), s.v_col(k)) - 1.0) < 1e-12);
    }
}

TEST_CASE("svd of a diagonal matrix") {
    Matrix a(2, 2);
    a(0, 0) = 3.0;
    a(1, 1) = 2.0;
    const SingularSystem s = svd(a);
    REQUIRE(s.rank == 2);
    CHECK(s.sigma[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(s.sigma[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("svd reconstruction and orthogonality on a random 5x3 matrix") {
    RandomSource src(42);
    const Matrix a = random_matrix(src, 5, 3);
    const SingularSystem s = svd(a);
    CHECK(reconstruction_error(a, s) <= 1e-10 * frobenius_norm(a));
    for (std::size_t p = 0; p < s.rank; ++p)
        for (std::size_t q = 0; q < s.rank; ++q) {
            const double target = (p == q) ? 1.0 : 0.0;
            CHECK(std::abs(dot(s.u_col(p), s.u_col(q)) - target) <= 1e-10);
            CHECK(std::abs(dot(s.v_col(p), s.v_col(q)) - target) <= 1e-10);
        }
}

TEST_CASE("singular triple relations A v = sigma u, A^T u = sigma v") {
    RandomSource src(7);
    const Matrix a = random_matrix(src, 9, 6);
    const SingularSystem s = svd(a);
    for (std::size_t k = 0; k < s.rank; ++k) {
        CHECK(norm2(a * s.v_col(k) - s.sigma[k] * s.u_col(k)) <= 1e-10 * s.sigma[0]);
        CHECK(norm2(mul_transposed(a, s.u_col(k)) - s.sigma[k] * s.v_col(k)) <=
              1e-10 * s.sigma[0]);
    }
}

TEST_CASE("svd is permutation stable in the singular values") {
    RandomSource src(13);
    const Matrix a = random_matrix(src, 6, 4);
    Matrix b(6, 4);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 4; ++j) b((i + 2) % 6, j) = a(i, j);
    const SingularSystem sa = svd(a), sb = svd(b);
    REQUIRE(sa.rank == sb.rank);
    for (std::size_t k = 0; k < sa.rank; ++k)
        CHECK(std::abs(sa.sigma[k] - sb.sigma[k]) <= 1e-10 * sa.sigma[0]);
}

TEST_CASE("svd rejects non-finite input") {
    Matrix a(2, 2);
    a(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(svd(a), std::invalid_argument);
}

TEST_CASE("solve_spd on simple systems") {
    Matrix a(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 2.0;
    const Vector x = solve_spd(a, {2.0, 4.0});
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-12));

    Matrix b(2, 2);
    b(0, 0) = 2.0;
    b(0, 1) = 1.0;
    b(1, 0) = 1.0;
    b(1, 1) = 2.0;
    const Vector y = solve_spd(b, {3.0, 3.0});
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(y[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solve_spd residual on a random 20x20 SPD system") {
    RandomSource src(99);
    const Matrix m = random_matrix(src, 20, 20);
    Matrix a(20, 20);
    for (std::size_t i = 0; i < 20; ++i) {
        for (std::size_t j = 0; j < 20; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < 20; ++k) s += m(k, i) * m(k, j);
            a(i, j) = s;
        }
        a(i, i) += 1.0;
    }
    const Vector b = gaussian_vector(src, 20);
    const Vector x = solve_spd(a, b);
    CHECK(norm2(a * x - b) <= 1e-10 * (frobenius_norm(a) * norm2(x) + norm2(b)));
}

TEST_CASE("solve_spd rejects asymmetric and indefinite input") {
    Matrix a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(1, 0) = 0.0;
    a(1, 1) = 1.0;
    CHECK_THROWS_AS(solve_spd(a, {1.0, 1.0}), std::invalid_argument);

    Matrix b(2, 2);
    b(0, 0) = 1.0;
    b(1, 1) = -1.0;
    CHECK_THROWS_AS(solve_spd(b, {1.0, 1.0}), std::runtime_error);
}

TEST_CASE("cholesky factor reproduces the matrix") {
    Matrix a(3, 3);
    for (std::size_t i = 0; i < 3; ++i) a(i, i) = 2.0;
    a(0, 1) = a(1, 0) = 1.0;
    a(1, 2) = a(2, 1) = 0.5;
    const Matrix l = cholesky(a);
    const Matrix llt = l * l.transposed();
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(llt(i, j) == doctest::Approx(a(i, j)).epsilon(1e-12));
}

TEST_CASE("random streams are seed-deterministic") {
    RandomSource a(2024), b(2024);
    const Vector va = gaussian_vector(a, 64);
    const Vector vb = gaussian_vector(b, 64);
    for (std::size_t i = 0; i < 64; ++i) CHECK(va[i] == vb[i]);

    RandomSource c(2025);
    const Vector vc = gaussian_vector(c, 64);
    CHECK(norm2(va - vc) > 0.0);
}

TEST_CASE("gaussian moments over 1e5 draws") {
    RandomSource src(5);
    const std::size_t n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = src.gaussian();
        sum += g;
        sum2 += g * g;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sum2 / static_cast<double>(n) - mean * mean;
    CHECK(std::abs(mean) <= 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) <= 0.05);
}

TEST_SUITE_END();
