#pragma once

#include <optional>
#include <string>

#include "illposed/problems.hpp"

namespace illposed {

enum class StopReason { discrepancy, max_iter, stagnation };

struct IterationTrace {
    Vector x;                      // final iterate
    std::size_t N = 0;             // stopping index
    StopReason stop_reason = StopReason::max_iter;
    Vector residual_norms;         // ||F(x_n) - y||, n = 0..N
    Vector error_norms;            // ||x_n - x_ref|| when a reference is given
    Vector alphas;                 // per-step regularization (lm/irgn)
    Vector lin_residual_ratios;    // lm: ||F'h+F-y|| / ||F-y|| per accepted step
    double rescale_factor = 1.0;   // applied to F and y by nl_landweber
};

struct NonlinearityProbe {
    double eta_estimate = 0.0;        // tangential cone ratio, sampled sup
    double lipschitz_estimate = 0.0;  // 2 ||remainder|| / ||h||^2, sampled sup
};

struct DerivativeCheck {
    double slope = 0.0;   // log-log slope of the Taylor remainder vs ||h||
    bool exact = false;   // remainder below 1e-12 at every scale (linear F)
};

// Taylor-remainder order of F' against central scaling of h; scales are
// decreasing h-norms.
DerivativeCheck check_derivative(const NonlinearProblem& p, const Vector& x,
                                 const Vector& direction, const Vector& scales);

NonlinearityProbe tangential_cone_probe(const NonlinearProblem& p, const Vector& x,
                                        double radius, std::size_t samples,
                                        RandomSource& src);

// Approximate stationary point of J_alpha(x) = 0.5||F(x)-y||^2
// + (alpha/2)||x-x0||^2 by damped Gauss-Newton with Armijo backtracking.
// Throws std::runtime_error if the gradient tolerance is not reached within
// the iteration budget.
Vector nl_tikhonov(const NonlinearProblem& p, const Vector& y_delta, double alpha,
                   const Vector& x0, std::size_t max_inner = 200);

struct DiscrepancySearchResult {
    double alpha = 0.0;
    Vector x;
    bool x0_acceptable = false;  // ||F(x0)-y|| <= tau*delta already
};

// Scans the decreasing alpha grid for the first minimizer with
// delta < ||F(x_alpha)-y|| <= tau*delta.
DiscrepancySearchResult nl_tikhonov_discrepancy(const NonlinearProblem& p,
                                                const Vector& y_delta, double delta,
                                                double tau, const Vector& x0,
                                                const Vector& alphas);

// Nonlinear Landweber with omega = 1 after internal rescaling of F and y so
// that ||F'(x0)|| <= 1; stops by the discrepancy principle or max_iter.
IterationTrace nl_landweber(const NonlinearProblem& p, const Vector& y_delta,
                            double delta, double tau, const Vector& x0,
                            std::size_t max_iter,
                            const std::optional<Vector>& reference = std::nullopt);

// Levenberg-Marquardt with the residual-ratio rule: alpha_n is found by
// bisection on log alpha so the linearized residual equals
// sigma * ||F(x_n)-y||.
IterationTrace levenberg_marquardt(const NonlinearProblem& p, const Vector& y_delta,
                                   double delta, double tau, double sigma,
                                   const Vector& x0, std::size_t max_iter,
                                   const std::optional<Vector>& reference = std::nullopt);

// Iteratively regularized Gauss-Newton: alpha_n = alpha0 * q^-n, stop at the
// first n with alpha_n^((nu+1)/2) <= tau*delta.
IterationTrace irgn(const NonlinearProblem& p, const Vector& y_delta, double delta,
                    double tau, const Vector& x0, double alpha0, double q, double nu,
                    std::size_t max_iter,
                    const std::optional<Vector>& reference = std::nullopt);

}  // namespace illposed
