#pragma once

#include "illposed/linalg.hpp"
#include "illposed/spectral.hpp"

namespace illposed {

// Diagonalized statistical observation x_n^delta = x_n + (delta/sigma_n) xi_n.
struct SequenceModel {
    Vector sigma;         // positive, decreasing
    Vector x_dag_coeffs;  // x_n = <x_dag, v_n>
    double delta = 0.0;
};

struct LinearEstimator {
    Vector gamma;  // per-mode weights in [0, inf)
};

struct PinskerSolution {
    double kappa = 0.0;
    Vector gamma;               // max{0, 1 - kappa * a_n}
    std::size_t N_active = 0;   // count of nonzero weights
    double minimax_value = 0.0; // delta^2 sum sigma_n^-2 gamma_n
};

Vector simulate_sequence(const SequenceModel& model, RandomSource& src);

// sum((1-gamma_n)^2 x_n^2 + delta^2 gamma_n^2 / sigma_n^2)
double risk_closed_form(const LinearEstimator& est, const SequenceModel& model);

// Separate bias and variance sums; their total equals risk_closed_form bitwise.
struct RiskSplit {
    double bias = 0.0;
    double variance = 0.0;
};
RiskSplit risk_split(const LinearEstimator& est, const SequenceModel& model);

struct MonteCarloRisk {
    double estimate = 0.0;
    double standard_error = 0.0;
};

MonteCarloRisk risk_monte_carlo(const LinearEstimator& est, const SequenceModel& model,
                                std::size_t m, RandomSource& src);

// Linear minimax estimator weights for the source ellipsoid with a_n = sigma_n^-nu.
// kappa is found by monotone bisection on the defining fixed-point equation and
// cross-checked against the explicit truncated-sum formula.
PinskerSolution pinsker(const Vector& sigma, double nu, double rho, double delta);

// Worst-case risk of a cutoff/weight estimator over the ellipsoid
// sum sigma_n^-2nu x_n^2 <= rho^2: the bias objective is linear in x_n^2, so
// the maximum puts all mass on the worst mode.
double sup_risk_on_ellipsoid(const LinearEstimator& est, const Vector& sigma,
                             double nu, double rho, double delta);

// round(cN * delta^(-2/(2 mu (nu+1) + 1))), floored at 1.
std::size_t tsvd_minimax_dimension(double delta, double mu, double nu, double cN);

// gamma_n = phi_alpha(sigma_n^2) sigma_n^2 for any spectral filter.
LinearEstimator estimator_from_filter(const Filter& filter, double alpha,
                                      const Vector& sigma);

}  // namespace illposed
