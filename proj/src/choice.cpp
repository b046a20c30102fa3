#include "illposed/choice.hpp"

#include <cmath>

namespace illposed {

double apriori_alpha(double delta, double rho, double nu, double c) {
    if (!(delta > 0.0) || !(rho > 0.0) || !(nu > 0.0) || !(c > 0.0))
        throw std::invalid_argument("apriori_alpha: all arguments must be > 0");
    return c * std::pow(delta / rho, 2.0 / (nu + 1.0));
}

ChoiceOutcome morozov(const Matrix& a, const Vector& y_delta, double delta, double tau,
                      const Vector& alphas,
                      const std::function<Vector(double)>& solver) {
    if (!(tau > 1.0)) throw std::invalid_argument("morozov: tau must be > 1");
    if (alphas.empty()) throw std::invalid_argument("morozov: empty grid");
    for (std::size_t i = 1; i < alphas.size(); ++i)
        if (!(alphas[i] < alphas[i - 1]))
            throw std::invalid_argument("morozov: grid must be strictly decreasing");

    ChoiceOutcome out;
    out.rule = "morozov";
    const double threshold = tau * delta;
    double prev_residual = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const Vector x = solver(alphas[i]);
        const double res = norm2(a * x - y_delta);
        out.scan_values.push_back(res);
        // Tikhonov residuals are nondecreasing in alpha, so they must be
        // nonincreasing along the decreasing grid.
        if (res > prev_residual + 1e-10 * (1.0 + res))
            throw std::runtime_error("morozov: residual not monotone along the grid");
        prev_residual = res;
        if (res <= threshold) {
            out.alpha_selected = alphas[i];
            out.index = i;
            out.residual_at_selection = res;
            out.flagged = (i == 0);  // largest alpha already below tau*delta
            return out;
        }
    }
    throw std::runtime_error("morozov: grid exhausted, final residual " +
                             std::to_string(out.scan_values.back()) +
                             " > tau*delta = " + std::to_string(threshold));
}

ChoiceOutcome quasi_optimality(const Vector& alphas,
                               const std::vector<Vector>& solutions) {
    if (alphas.size() < 2 || solutions.size() != alphas.size())
        throw std::invalid_argument("quasi_optimality: need >= 2 grid points with solutions");
    for (std::size_t i = 1; i < alphas.size(); ++i)
        if (!(alphas[i] < alphas[i - 1]))
            throw std::invalid_argument("quasi_optimality: grid must be strictly decreasing");

    ChoiceOutcome out;
    out.rule = "quasi_optimality";
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < alphas.size(); ++i) {
        const double d = norm2(solutions[i + 1] - solutions[i]);
        out.scan_values.push_back(d);
        if (d < best_val) {  // strict: ties keep the smaller index (larger alpha)
            best_val = d;
            best = i;
        }
    }
    out.index = best;
    out.alpha_selected = alphas[best];
    return out;
}

ChoiceOutcome hanke_raus(const Vector& alphas, const Vector& residuals) {
    if (alphas.empty() || residuals.size() != alphas.size())
        throw std::invalid_argument("hanke_raus: grid and residuals must match and be nonempty");
    ChoiceOutcome out;
    out.rule = "hanke_raus";
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double psi = residuals[i] / std::sqrt(alphas[i]);
        out.scan_values.push_back(psi);
        const bool better =
            psi < best_val || (psi == best_val && alphas[i] > alphas[best]);
        if (better) {
            best_val = psi;
            best = i;
        }
    }
    out.index = best;
    out.alpha_selected = alphas[best];
    out.residual_at_selection = residuals[best];
    return out;
}

ChoiceOutcome l_curve(const Vector& alphas, const Vector& residuals,
                      const Vector& solution_norms) {
    if (alphas.empty() || residuals.size() != alphas.size() ||
        solution_norms.size() != alphas.size())
        throw std::invalid_argument("l_curve: grids must match and be nonempty");
    ChoiceOutcome out;
    out.rule = "l_curve";
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double p = residuals[i] * solution_norms[i];
        out.scan_values.push_back(p);
        const bool better = p < best_val || (p == best_val && alphas[i] > alphas[best]);
        if (better) {
            best_val = p;
            best = i;
        }
    }
    out.index = best;
    out.alpha_selected = alphas[best];
    out.residual_at_selection = residuals[best];
    return out;
}

Vector geometric_grid(double alpha0, double q, std::size_t count) {
    if (!(alpha0 > 0.0) || !(q > 0.0) || q >= 1.0 || count == 0)
        throw std::invalid_argument("geometric_grid: need alpha0 > 0, q in (0,1), count >= 1");
    Vector g(count);
    double a = alpha0;
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = a;
        a *= q;
    }
    return g;
}

}  // namespace illposed
