#include <cmath>

#include "doctest.h"
#include "illposed/problems.hpp"

using namespace illposed;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_SUITE_BEGIN("problems");

TEST_CASE("integration operator maps the constant to the grid") {
    const LinearProblem p = make_integration_operator(16);
    const Vector y = p.A * Vector(16, 1.0);
    for (std::size_t i = 0; i < 16; ++i)
        CHECK(y[i] == doctest::Approx(p.grid[i]).epsilon(1e-12));
}

TEST_CASE("integration operator needs n >= 4") {
    CHECK_THROWS_AS(make_integration_operator(3), std::invalid_argument);
}

TEST_CASE("integration operator singular values match the closed form") {
    for (std::size_t n : {std::size_t(64), std::size_t(128)}) {
        const LinearProblem p = make_integration_operator(n);
        const SingularSystem s = svd(p.A);
        for (std::size_t k = 1; k <= 10; ++k) {
            const double expected = 2.0 / ((2.0 * static_cast<double>(k) - 1.0) * kPi);
            CHECK(std::abs(s.sigma[k - 1] - expected) <= 2.0 / static_cast<double>(n));
        }
    }
}

TEST_CASE("analytic system matches the discrete SVD") {
    const std::size_t n = 64;
    const LinearProblem p = make_integration_operator(n);
    REQUIRE(p.analytic_system.has_value());
    const SingularSystem s = svd(p.A);
    for (std::size_t k = 1; k <= 5; ++k) {
        CHECK(std::abs(p.analytic_system->sigma(k) - s.sigma[k - 1]) <=
              2.0 / static_cast<double>(n));
        const double cv =
            std::min(1.0, std::abs(dot(p.analytic_system->v(k), s.v_col(k - 1))));
        CHECK(std::acos(cv) <= 5e-2);
    }
}

TEST_CASE("kernel operator basics") {
    const LinearProblem zero =
        make_kernel_operator(8, [](double, double) { return 0.0; });
    CHECK(frobenius_norm(zero.A) == 0.0);

    // indicator kernel reproduces the integration operator except the diagonal
    const LinearProblem ind =
        make_kernel_operator(8, [](double s, double t) { return s <= t ? 1.0 : 0.0; });
    const LinearProblem integ = make_integration_operator(8);
    const double h = 1.0 / 8.0;
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            if (i == j)
                CHECK(ind.A(i, j) == doctest::Approx(h).epsilon(1e-14));
            else
                CHECK(ind.A(i, j) == doctest::Approx(integ.A(i, j)).epsilon(1e-14));
        }

    const LinearProblem sym = make_kernel_operator(
        8, [](double s, double t) { return std::exp(-(s - t) * (s - t)); });
    double asym = 0.0;
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            asym += (sym.A(i, j) - sym.A(j, i)) * (sym.A(i, j) - sym.A(j, i));
    CHECK(std::sqrt(asym) <= 1e-12);
}

TEST_CASE("ground truth realizes the source condition") {
    const LinearProblem p = make_integration_operator(32);
    const SingularSystem s = svd(p.A);
    RandomSource src(31);
    const Vector w = gaussian_vector(src, 32);

    SUBCASE("nu = 0 is the identity for injective operators") {
        const GroundTruth gt = make_ground_truth(s, 0.0, w);
        CHECK(norm2(gt.x_dag - w) <= 1e-10 * norm2(w));
        CHECK(gt.rho == doctest::Approx(norm2(w)).epsilon(1e-14));
    }

    SUBCASE("nu = 2 equals A^T A w") {
        const GroundTruth gt = make_ground_truth(s, 2.0, w);
        const Vector ref = mul_transposed(p.A, p.A * w);
        CHECK(norm2(gt.x_dag - ref) <= 1e-10 * norm2(ref));
    }

    SUBCASE("strengthened Picard condition holds") {
        const GroundTruth gt = make_ground_truth(s, 1.0, w);
        const Vector y = p.A * gt.x_dag;
        double sum = 0.0;
        for (std::size_t k = 0; k < s.rank; ++k) {
            const double c = dot(s.u_col(k), y);
            sum += std::pow(s.sigma[k], -2.0 - 2.0 * gt.nu) * c * c;
        }
        CHECK(sum <= gt.rho * gt.rho + 1e-8);
    }

    SUBCASE("smoothing never amplifies beyond sigma_1^nu") {
        for (double nu : {0.5, 1.0, 2.0}) {
            const GroundTruth gt = make_ground_truth(s, nu, w);
            CHECK(norm2(gt.x_dag) <= std::pow(s.sigma[0], nu) * gt.rho * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("exact-norm noise") {
    RandomSource src(41);
    const Vector y = gaussian_vector(src, 20);

    CHECK(norm2(add_noise_exact(y, 0.0, src) - y) == 0.0);

    for (double delta : {1.0, 1e-3, 1e-8}) {
        const Vector yd = add_noise_exact(y, delta, src);
        CHECK(norm2(yd - y) == doctest::Approx(delta).epsilon(1e-12));
    }

    RandomSource s1(1), s2(2);
    const Vector a = add_noise_exact(y, 0.1, s1);
    const Vector b = add_noise_exact(y, 0.1, s2);
    CHECK(norm2(a - b) > 0.0);
}

TEST_CASE("autoconvolution") {
    const std::size_t n = 16;
    const NonlinearProblem p = make_autoconvolution(n);
    const double h = 1.0 / static_cast<double>(n);

    CHECK(norm2(p.forward(Vector(n, 0.0))) == 0.0);
    CHECK(frobenius_norm(p.derivative(Vector(n, 0.0))) == 0.0);

    const Vector ones = p.forward(Vector(n, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        CHECK(ones[i] == doctest::Approx(h * static_cast<double>(i + 1)).epsilon(1e-12));

    // derivative against central differences
    RandomSource src(51);
    const Vector x = gaussian_vector(src, n);
    const Vector d = gaussian_vector(src, n);
    const Matrix dfx = p.derivative(x);
    for (double eps : {1e-3, 1e-4}) {
        const Vector plus = p.forward(x + eps * d);
        const Vector minus = p.forward(x + (-eps) * d);
        Vector fd(n);
        for (std::size_t i = 0; i < n; ++i) fd[i] = (plus[i] - minus[i]) / (2.0 * eps);
        CHECK(norm2(fd - dfx * d) <= 1e-6 * (1.0 + norm2(fd)));
    }
}

TEST_CASE("diagonal cubic") {
    const Vector sigma = {1.0, 0.5, 0.25};

    SUBCASE("c = 0 reduces to the linear diagonal operator") {
        const NonlinearProblem p = make_diagonal_cubic(sigma, 0.0);
        const Vector y = p.forward({1.0, 1.0, 1.0});
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(y[k] == doctest::Approx(sigma[k]).epsilon(1e-14));
        const SingularSystem s = svd(p.derivative({0.0, 0.0, 0.0}));
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(s.sigma[k] == doctest::Approx(sigma[k]).epsilon(1e-12));
    }

    SUBCASE("value and derivative at zero") {
        const NonlinearProblem p = make_diagonal_cubic(sigma, 2.0);
        CHECK(norm2(p.forward({0.0, 0.0, 0.0})) == 0.0);
        const Matrix d = p.derivative({0.0, 0.0, 0.0});
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(d(k, k) == doctest::Approx(sigma[k]).epsilon(1e-14));
    }

    SUBCASE("Taylor remainder is quadratic") {
        const NonlinearProblem p = make_diagonal_cubic(sigma, 1.0);
        RandomSource src(61);
        const Vector x = gaussian_vector(src, 3);
        const Vector d = gaussian_vector(src, 3);
        const Vector fx = p.forward(x);
        const Matrix dfx = p.derivative(x);
        double prev_ratio = -1.0;
        for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
            const Vector h = (eps / norm2(d)) * d;
            const double rem = norm2(p.forward(x + h) - fx - dfx * h);
            const double ratio = rem / (eps * eps);
            if (prev_ratio >= 0.0) CHECK(ratio == doctest::Approx(prev_ratio).epsilon(0.05));
            prev_ratio = ratio;
        }
    }

    SUBCASE("rejects nonpositive sigma") {
        CHECK_THROWS_AS(make_diagonal_cubic({1.0, 0.0}, 1.0), std::invalid_argument);
    }
}

TEST_SUITE_END();
