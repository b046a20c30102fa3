#include "illposed/statistics.hpp"

#include <algorithm>
#include <cmath>

namespace illposed {

Vector simulate_sequence(const SequenceModel& model, RandomSource& src) {
    const std::size_t n = model.sigma.size();
    if (model.x_dag_coeffs.size() != n)
        throw std::invalid_argument("simulate_sequence: coefficient length mismatch");
    Vector out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = model.x_dag_coeffs[k] + (model.delta / model.sigma[k]) * src.gaussian();
    return out;
}

RiskSplit risk_split(const LinearEstimator& est, const SequenceModel& model) {
    const std::size_t n = model.sigma.size();
    if (est.gamma.size() != n)
        throw std::invalid_argument("risk: estimator/model length mismatch");
    RiskSplit s;
    for (std::size_t k = 0; k < n; ++k) {
        const double b = 1.0 - est.gamma[k];
        s.bias += b * b * model.x_dag_coeffs[k] * model.x_dag_coeffs[k];
        const double v = model.delta * est.gamma[k] / model.sigma[k];
        s.variance += v * v;
    }
    return s;
}

double risk_closed_form(const LinearEstimator& est, const SequenceModel& model) {
    const std::size_t n = model.sigma.size();
    if (est.gamma.size() != n)
        throw std::invalid_argument("risk_closed_form: estimator/model length mismatch");
    double r = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double b = 1.0 - est.gamma[k];
        const double v = model.delta * est.gamma[k] / model.sigma[k];
        r += b * b * model.x_dag_coeffs[k] * model.x_dag_coeffs[k] + v * v;
    }
    return r;
}

MonteCarloRisk risk_monte_carlo(const LinearEstimator& est, const SequenceModel& model,
                                std::size_t m, RandomSource& src) {
    if (m < 2) throw std::invalid_argument("risk_monte_carlo: need M >= 2");
    const std::size_t n = model.sigma.size();
    // Welford accumulation: the variance is exactly zero for constant samples.
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const Vector xd = simulate_sequence(model, src);
        double err2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double e = est.gamma[k] * xd[k] - model.x_dag_coeffs[k];
            err2 += e * e;
        }
        const double d1 = err2 - mean;
        mean += d1 / static_cast<double>(i + 1);
        m2 += d1 * (err2 - mean);
    }
    MonteCarloRisk r;
    const double dm = static_cast<double>(m);
    r.estimate = mean;
    r.standard_error = std::sqrt(std::max(0.0, m2 / (dm - 1.0)) / dm);
    return r;
}

PinskerSolution pinsker(const Vector& sigma, double nu, double rho, double delta) {
    if (sigma.empty() || !(nu > 0.0) || !(rho > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("pinsker: need nonempty sigma and positive nu, rho, delta");
    const std::size_t n = sigma.size();
    Vector a(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(sigma[k] > 0.0)) throw std::invalid_argument("pinsker: sigma must be positive");
        if (k > 0 && sigma[k] > sigma[k - 1])
            throw std::invalid_argument("pinsker: sigma must be nonincreasing");
        a[k] = std::pow(sigma[k], -nu);
    }

    // g(kappa) = kappa rho^2 - delta^2 sum (a_n/sigma_n^2) max{0, 1-kappa a_n}
    // is strictly increasing with g(0) <= 0 and g(1/min a) > 0.
    auto g = [&](double kappa) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            s += a[k] / (sigma[k] * sigma[k]) * std::max(0.0, 1.0 - kappa * a[k]);
        return kappa * rho * rho - delta * delta * s;
    };
    const double a_min = *std::min_element(a.begin(), a.end());
    double lo = 0.0, hi = 1.0 / a_min;
    if (!(g(lo) <= 0.0 && g(hi) > 0.0))
        throw std::invalid_argument("pinsker: root not bracketed (degenerate inputs)");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) <= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    PinskerSolution sol;
    sol.kappa = 0.5 * (lo + hi);

    // Cross-check against the closed form on the active set implied by kappa:
    //   kappa = sum a_n/sigma_n^2 / (rho^2/delta^2 + sum a_n^2/sigma_n^2).
    double num = 0.0, den = rho * rho / (delta * delta);
    for (std::size_t k = 0; k < n; ++k) {
        if (1.0 - sol.kappa * a[k] > 0.0) {
            num += a[k] / (sigma[k] * sigma[k]);
            den += a[k] * a[k] / (sigma[k] * sigma[k]);
        }
    }
    const double kappa_explicit = num / den;
    if (std::abs(kappa_explicit - sol.kappa) > 1e-10 * std::max(1.0, sol.kappa))
        throw std::runtime_error("pinsker: explicit formula disagrees with the root");
    sol.kappa = kappa_explicit;  // closed form is exact on the active set

    sol.gamma.resize(n);
    sol.minimax_value = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sol.gamma[k] = std::max(0.0, 1.0 - sol.kappa * a[k]);
        if (sol.gamma[k] > 0.0) ++sol.N_active;
        sol.minimax_value += delta * delta / (sigma[k] * sigma[k]) * sol.gamma[k];
    }
    return sol;
}

double sup_risk_on_ellipsoid(const LinearEstimator& est, const Vector& sigma,
                             double nu, double rho, double delta) {
    const std::size_t n = sigma.size();
    if (est.gamma.size() != n)
        throw std::invalid_argument("sup_risk_on_ellipsoid: length mismatch");
    // bias term is linear in x_n^2, so its sup over the ellipsoid sits at a
    // vertex: all mass on the mode maximizing (1-gamma_n)^2 sigma_n^(2 nu)
    double worst_bias = 0.0;
    double variance = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double b = 1.0 - est.gamma[k];
        worst_bias = std::max(worst_bias, b * b * std::pow(sigma[k], 2.0 * nu));
        const double v = delta * est.gamma[k] / sigma[k];
        variance += v * v;
    }
    return rho * rho * worst_bias + variance;
}

std::size_t tsvd_minimax_dimension(double delta, double mu, double nu, double cN) {
    if (!(delta > 0.0) || !(mu > 0.0) || !(nu > 0.0) || !(cN > 0.0))
        throw std::invalid_argument("tsvd_minimax_dimension: all arguments must be > 0");
    const double expo = -2.0 / (2.0 * mu * (nu + 1.0) + 1.0);
    const double v = cN * std::pow(delta, expo);
    const auto n = static_cast<long long>(std::llround(v));
    return n < 1 ? 1 : static_cast<std::size_t>(n);
}

LinearEstimator estimator_from_filter(const Filter& filter, double alpha,
                                      const Vector& sigma) {
    LinearEstimator est;
    est.gamma.resize(sigma.size());
    for (std::size_t k = 0; k < sigma.size(); ++k) {
        const double lambda = sigma[k] * sigma[k];
        est.gamma[k] = filter.phi(alpha, lambda) * lambda;
    }
    return est;
}

}  // namespace illposed
