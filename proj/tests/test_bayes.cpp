#include <cmath>

#include "doctest.h"
#include "illposed/bayes.hpp"
#include "illposed/pinv.hpp"
#include "illposed/spectral.hpp"

using namespace illposed;

namespace {

Matrix random_matrix(RandomSource& src, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = src.gaussian();
    return m;
}

}  // namespace

TEST_SUITE_BEGIN("bayes");

TEST_CASE("map estimate") {
    Matrix t(1, 1);
    t(0, 0) = 1.0;

    SUBCASE("scalar closed form") {
        const Vector x = map_estimate(t, {1.0}, 0.1, 1.0);
        CHECK(x[0] == doctest::Approx(1.0 / 1.01).epsilon(1e-14));
    }

    SUBCASE("a flat prior recovers the minimum-norm solution") {
        RandomSource src(8);
        const Matrix a = random_matrix(src, 6, 4);
        const Vector y = gaussian_vector(src, 6);
        const Vector x = map_estimate(a, y, 0.1, 1e6);
        CHECK(norm2(x - min_norm_solution(a, y)) <= 1e-6 * (1.0 + norm2(x)));
    }

    SUBCASE("zero data gives zero") {
        CHECK(norm2(map_estimate(t, {0.0}, 0.1, 1.0)) == 0.0);
    }

    SUBCASE("coincides with quadratic regularization at the matched weight") {
        RandomSource src(9);
        const Matrix a = random_matrix(src, 32, 32);
        const Vector y = gaussian_vector(src, 32);
        const double delta = 0.05, sp = 2.0;
        const Vector xm = map_estimate(a, y, delta, sp);
        const Vector xt = tikhonov_solve(a, y, delta * delta / (sp * sp));
        CHECK(norm2(xm - xt) <= 1e-12 * (1.0 + norm2(xt)));
    }

    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(map_estimate(t, {1.0}, 0.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(map_estimate(t, {1.0}, 0.1, 0.0), std::invalid_argument);
    }
}

TEST_CASE("posterior covariance") {
    SUBCASE("scalar closed form") {
        Matrix t(1, 1);
        t(0, 0) = 1.0;
        const GaussianPosterior p = posterior(t, {1.0}, 0.1, 1.0);
        CHECK(p.mean[0] == doctest::Approx(1.0 / 1.01).epsilon(1e-14));
        CHECK(p.covariance(0, 0) == doctest::Approx(0.01 / 1.01).epsilon(1e-14));
    }

    SUBCASE("a zero operator returns the prior covariance") {
        const Matrix t(3, 3);
        const GaussianPosterior p = posterior(t, {0.0, 0.0, 0.0}, 0.1, 2.0);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                CHECK(p.covariance(i, j) ==
                      doctest::Approx(i == j ? 4.0 : 0.0).epsilon(1e-12));
        CHECK(norm2(p.mean) == 0.0);
    }

    SUBCASE("covariance inverts the precision matrix") {
        RandomSource src(10);
        const Matrix t = random_matrix(src, 8, 8);
        const double delta = 0.3, sp = 1.5;
        const GaussianPosterior p = posterior(t, gaussian_vector(src, 8), delta, sp);
        // precision = (T^T T + (delta^2/sp^2) I) / delta^2
        Matrix prec = t.transposed() * t;
        for (std::size_t i = 0; i < 8; ++i)
            prec(i, i) += delta * delta / (sp * sp);
        const Matrix prod = prec * p.covariance;
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = 0; j < 8; ++j)
                CHECK(std::abs(prod(i, j) - (i == j ? delta * delta : 0.0)) <= 1e-12);
        // symmetry
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = 0; j < i; ++j)
                CHECK(p.covariance(i, j) == p.covariance(j, i));
    }

    SUBCASE("eigenvalues sit between the floor and the prior variance") {
        RandomSource src(11);
        const Matrix t = random_matrix(src, 10, 6);
        const double delta = 0.2, sp = 1.0;
        const GaussianPosterior p = posterior(t, gaussian_vector(src, 10), delta, sp);
        const SingularSystem s = svd(p.covariance);
        CHECK(s.sigma[0] <= sp * sp + 1e-10);
        CHECK(s.sigma[s.rank - 1] > 0.0);
    }
}

TEST_CASE("posterior sampler moments") {
    RandomSource src(12);
    const Matrix t = random_matrix(src, 6, 3);
    const GaussianPosterior p = posterior(t, gaussian_vector(src, 6), 0.5, 1.0);
    const PosteriorSampler sampler(p);

    const std::size_t reps = 50000;
    Vector mean(3, 0.0);
    Matrix cov(3, 3);
    for (std::size_t r = 0; r < reps; ++r) {
        const Vector x = sampler.sample(src);
        for (std::size_t i = 0; i < 3; ++i) mean[i] += x[i];
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                cov(i, j) += (x[i] - p.mean[i]) * (x[j] - p.mean[j]);
    }
    for (std::size_t i = 0; i < 3; ++i) {
        mean[i] /= double(reps);
        const double sd = std::sqrt(p.covariance(i, i) / double(reps));
        CHECK(std::abs(mean[i] - p.mean[i]) <= 4.0 * sd);
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::abs(cov(i, j) / double(reps) - p.covariance(i, j)) <=
                  0.05 * p.covariance(i, i));
    }
}

TEST_CASE("conditional-mean monte carlo") {
    RandomSource src(13);

    SUBCASE("a zero operator averages the prior toward zero") {
        const Matrix t(2, 2);
        RandomSource s(14);
        const CmResult r = cm_monte_carlo(t, {0.0, 0.0}, 1.0, 1.0, 40000, s);
        CHECK(norm2(r.estimate) <= 4.0 / std::sqrt(40000.0));
        CHECK(r.effective_sample_size == doctest::Approx(40000.0).epsilon(1e-12));
    }

    SUBCASE("identical seeds reproduce the estimate bit for bit") {
        const Matrix t = random_matrix(src, 3, 3);
        const Vector y = gaussian_vector(src, 3);
        RandomSource s1(15), s2(15);
        const CmResult a = cm_monte_carlo(t, y, 0.5, 1.0, 2000, s1);
        const CmResult b = cm_monte_carlo(t, y, 0.5, 1.0, 2000, s2);
        CHECK(norm2(a.estimate - b.estimate) == 0.0);
        CHECK(a.effective_sample_size == b.effective_sample_size);
    }

    SUBCASE("approaches the analytic posterior mean") {
        Matrix t(1, 1);
        t(0, 0) = 1.0;
        RandomSource s(16);
        const CmResult r = cm_monte_carlo(t, {1.0}, 0.5, 1.0, 200000, s);
        CHECK(r.estimate[0] == doctest::Approx(1.0 / 1.25).epsilon(0.02));
    }

    SUBCASE("vanishing noise makes the weights degenerate") {
        const Matrix t = Matrix::identity(4);
        Vector y(4, 50.0);  // far outside the prior bulk
        RandomSource s(17);
        CHECK_THROWS_AS(cm_monte_carlo(t, y, 1e-8, 1.0, 100, s),
                        std::runtime_error);
    }
}

TEST_CASE("incomplete gamma and chi-square quantiles") {
    SUBCASE("P(1, x) = 1 - exp(-x)") {
        for (double x : {0.1, 1.0, 3.0, 10.0}) {
            CHECK(regularized_gamma_p(1.0, x) ==
                  doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
        }
    }

    SUBCASE("P(1/2, x) = erf(sqrt(x))") {
        for (double x : {0.05, 0.5, 2.0, 8.0}) {
            CHECK(regularized_gamma_p(0.5, x) ==
                  doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-12));
        }
    }

    SUBCASE("standard normal quantile through the one-dimensional case") {
        // r^2 with P(r^2; 1 dof) = 0.95 -> r = 1.959964
        const double r2 = chi_square_quantile(1, 0.95);
        CHECK(std::sqrt(r2) == doctest::Approx(1.95996398454).epsilon(1e-8));
    }

    SUBCASE("two degrees of freedom has an exponential closed form") {
        for (double p : {0.5, 0.9, 0.99}) {
            CHECK(chi_square_quantile(2, p) ==
                  doctest::Approx(-2.0 * std::log(1.0 - p)).epsilon(1e-9));
        }
    }

    SUBCASE("radius shrinks to zero as the mass vanishes") {
        CHECK(chi_square_quantile(3, 1e-6) <= 0.05);
        CHECK(chi_square_quantile(3, 0.999) > chi_square_quantile(3, 0.9));
    }
}

TEST_CASE("hpd credible sets") {
    RandomSource src(18);
    const Matrix t = random_matrix(src, 6, 4);
    const GaussianPosterior post = posterior(t, gaussian_vector(src, 6), 0.3, 1.0);

    SUBCASE("radius matches the chi-square quantile") {
        const HpdSet set = hpd_credible_set(post, 0.05);
        CHECK(set.mahalanobis_radius ==
              doctest::Approx(std::sqrt(chi_square_quantile(4, 0.95))).epsilon(1e-10));
    }

    SUBCASE("smaller alpha gives a larger set") {
        CHECK(hpd_credible_set(post, 0.01).mahalanobis_radius >
              hpd_credible_set(post, 0.2).mahalanobis_radius);
    }

    SUBCASE("empirical coverage matches the nominal level") {
        const PosteriorSampler sampler(post);
        for (double alpha : {0.5, 0.1}) {
            const HpdSet set = hpd_credible_set(post, alpha);
            const double r2 = set.mahalanobis_radius * set.mahalanobis_radius;
            std::size_t inside = 0;
            const std::size_t reps = 20000;
            for (std::size_t i = 0; i < reps; ++i) {
                const Vector x = sampler.sample(src);
                const Vector d = x - post.mean;
                if (dot(d, solve_spd(post.covariance, d)) <= r2) ++inside;
            }
            CHECK(double(inside) / double(reps) ==
                  doctest::Approx(1.0 - alpha).epsilon(0.03));
        }
    }
}

TEST_SUITE_END();
