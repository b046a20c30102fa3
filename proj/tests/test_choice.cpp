#include <cmath>

#include "doctest.h"
#include "illposed/choice.hpp"
#include "illposed/problems.hpp"
#include "illposed/spectral.hpp"

using namespace illposed;

TEST_SUITE_BEGIN("choice");

TEST_CASE("a priori power rule") {
    CHECK(apriori_alpha(0.5, 0.5, 1.7, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(apriori_alpha(1e-3, 1.0, 2.0, 1.0) == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK(apriori_alpha(1e-4, 1.0, 1.0, 1.0) == doctest::Approx(1e-4).epsilon(1e-12));
    // exact homogeneity in (delta, rho)
    CHECK(apriori_alpha(3.0 * 1e-3, 3.0 * 0.7, 1.3, 2.0) ==
          doctest::Approx(apriori_alpha(1e-3, 0.7, 1.3, 2.0)).epsilon(1e-14));
}

TEST_CASE("morozov on the scalar problem") {
    Matrix a(1, 1);
    a(0, 0) = 1.0;
    const Vector y = {1.0};
    const double delta = 0.1, tau = 2.1;
    auto solver = [&](double alpha) { return tikhonov_solve(a, y, alpha); };
    // residual alpha/(1+alpha) <= 0.21 first holds at alpha = 0.25 on this grid
    const Vector grid = geometric_grid(4.0, 0.5, 10);

    const ChoiceOutcome out = morozov(a, y, delta, tau, grid, solver);
    CHECK(out.alpha_selected == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(out.residual_at_selection <= tau * delta);
    CHECK_FALSE(out.flagged);
    // the previous (larger) grid point violates the bound
    CHECK(out.index > 0);
    CHECK(norm2(a * solver(grid[out.index - 1]) - y) > tau * delta);
}

TEST_CASE("morozov flags an immediately acceptable first point") {
    Matrix a(1, 1);
    a(0, 0) = 1.0;
    auto solver = [&](double alpha) { return tikhonov_solve(a, {1.0}, alpha); };
    const ChoiceOutcome out = morozov(a, {1.0}, 0.1, 2.0, geometric_grid(0.1, 0.5, 5), solver);
    CHECK(out.index == 0);
    CHECK(out.flagged);
}

TEST_CASE("morozov exhaustion raises an error") {
    Matrix a(1, 1);
    a(0, 0) = 1.0;
    auto solver = [&](double alpha) { return tikhonov_solve(a, {1.0}, alpha); };
    // residual can't get below 0.5 on this grid of huge alphas
    CHECK_THROWS_AS(morozov(a, {1.0}, 1e-6, 1.5, geometric_grid(100.0, 0.9, 3), solver),
                    std::runtime_error);
}

TEST_CASE("morozov requires tau > 1 and a decreasing grid") {
    Matrix a(1, 1);
    a(0, 0) = 1.0;
    auto solver = [&](double alpha) { return tikhonov_solve(a, {1.0}, alpha); };
    CHECK_THROWS_AS(morozov(a, {1.0}, 0.1, 1.0, geometric_grid(1.0, 0.5, 4), solver),
                    std::invalid_argument);
    CHECK_THROWS_AS(morozov(a, {1.0}, 0.1, 2.0, Vector{0.1, 0.2, 0.4}, solver),
                    std::invalid_argument);
}

TEST_CASE("quasi-optimality") {
    const Vector grid = {1.0, 0.5, 0.25, 0.125};

    SUBCASE("identical solutions tie-break to the largest alpha") {
        const std::vector<Vector> sols(4, Vector{1.0, 2.0});
        const ChoiceOutcome out = quasi_optimality(grid, sols);
        CHECK(out.index == 0);
        CHECK(out.alpha_selected == 1.0);
    }

    SUBCASE("argmin of consecutive differences") {
        // differences 3, 1, 2 -> minimum at the second gap
        const std::vector<Vector> sols = {{0.0}, {3.0}, {4.0}, {6.0}};
        const ChoiceOutcome out = quasi_optimality(grid, sols);
        CHECK(out.index == 1);
        CHECK(out.alpha_selected == 0.5);
    }

    SUBCASE("needs at least two grid points") {
        CHECK_THROWS_AS(quasi_optimality({1.0}, {{1.0}}), std::invalid_argument);
    }
}

TEST_CASE("hanke-raus") {
    SUBCASE("equal residuals select the largest alpha") {
        const ChoiceOutcome out = hanke_raus({1.0, 0.5, 0.25}, {2.0, 2.0, 2.0});
        CHECK(out.index == 0);
    }
    SUBCASE("two point example") {
        const ChoiceOutcome out = hanke_raus({1.0, 0.25}, {1.0, 0.6});
        CHECK(out.alpha_selected == 1.0);
    }
}

TEST_CASE("l-curve") {
    SUBCASE("argmin of the product") {
        const ChoiceOutcome out = l_curve({1.0, 0.5, 0.25}, {2.0, 1.0, 3.0},
                                          {1.0, 1.0, 1.0});
        CHECK(out.index == 1);
    }
    SUBCASE("all-zero products tie-break to the largest alpha") {
        const ChoiceOutcome out = l_curve({1.0, 0.5}, {0.0, 0.0}, {0.0, 0.0});
        CHECK(out.index == 0);
    }
}

TEST_CASE("heuristic rules are scale covariant") {
    const Vector grid = {1.0, 0.5, 0.25, 0.125};
    const Vector residuals = {3.0, 1.4, 0.9, 0.85};
    const Vector norms = {0.5, 1.0, 4.0, 9.0};
    const std::size_t hr = hanke_raus(grid, residuals).index;
    const std::size_t lc = l_curve(grid, residuals, norms).index;

    Vector scaled_res = residuals, scaled_norms = norms;
    for (double& v : scaled_res) v *= 7.5;
    for (double& v : scaled_norms) v *= 0.3;
    CHECK(hanke_raus(grid, scaled_res).index == hr);
    CHECK(l_curve(grid, scaled_res, scaled_norms).index == lc);

    std::vector<Vector> sols;
    for (double v : norms) sols.push_back({v, 2.0 * v});
    const std::size_t qo = quasi_optimality(grid, sols).index;
    std::vector<Vector> scaled_sols;
    for (const Vector& s : sols) scaled_sols.push_back(11.0 * s);
    CHECK(quasi_optimality(grid, scaled_sols).index == qo);
}

TEST_CASE("morozov error rate on the integration operator") {
    // error at the selected alpha scales like sqrt(delta) for a nu=1 truth
    const LinearProblem p = make_integration_operator(64);
    const SingularSystem s = svd(p.A);
    RandomSource wsrc(81);
    Vector w = gaussian_vector(wsrc, 64);
    const double wn = norm2(w);
    for (double& v : w) v /= wn;
    const GroundTruth gt = make_ground_truth(s, 1.0, w);
    const Vector y = p.A * gt.x_dag;

    const Filter tik = make_tikhonov_filter();
    Vector logd, loge;
    for (int i = 0; i < 4; ++i) {
        const double delta = 1e-2 * std::pow(10.0, -i);
        RandomSource noise(90 + i);
        const Vector yd = add_noise_exact(y, delta, noise);
        auto solver = [&](double alpha) { return filter_apply(tik, alpha, s, yd); };
        const ChoiceOutcome out =
            morozov(p.A, yd, delta, 2.0, geometric_grid(1.0, 0.7, 100), solver);
        logd.push_back(std::log(delta));
        loge.push_back(std::log(norm2(solver(out.alpha_selected) - gt.x_dag)));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < logd.size(); ++i) {
        mx += logd[i];
        my += loge[i];
    }
    mx /= 4.0;
    my /= 4.0;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < logd.size(); ++i) {
        sxx += (logd[i] - mx) * (logd[i] - mx);
        sxy += (logd[i] - mx) * (loge[i] - my);
    }
    CHECK(sxy / sxx == doctest::Approx(0.5).epsilon(0.4));
}

TEST_CASE("geometric grid") {
    const Vector g = geometric_grid(2.0, 0.5, 4);
    REQUIRE(g.size() == 4);
    CHECK(g[0] == 2.0);
    CHECK(g[3] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_SUITE_END();
