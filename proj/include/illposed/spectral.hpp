#pragma once

#include <functional>
#include <limits>
#include <string>

#include "illposed/linalg.hpp"

namespace illposed {

// Spectral filter family phi_alpha with residual function r = 1 - lambda*phi.
struct Filter {
    std::string name;  // "tsvd" | "tikhonov" | "landweber"
    std::function<double(double, double)> phi;  // (alpha, lambda)
    std::function<double(double, double)> r;
    double C_phi = 1.0;
    double qualification = std::numeric_limits<double>::infinity();
    double omega = 0.0;  // landweber relaxation, 0 otherwise
};

Filter make_tsvd_filter();
Filter make_tikhonov_filter();
// For Landweber, alpha = 1/m with m a positive integer number of steps.
Filter make_landweber_filter(double omega);

// R_alpha y = sum phi_alpha(sigma_n^2) sigma_n <y,u_n> v_n.
Vector filter_apply(const Filter& filter, double alpha, const SingularSystem& sys,
                    const Vector& y);

// Solves (A^T A + alpha I) x = A^T y.
Vector tikhonov_solve(const Matrix& a, const Vector& y, double alpha);

struct LandweberStop {
    // Run exactly max_iter steps, or stop at the first residual <= tau*delta.
    std::size_t max_iter = 0;
    bool use_discrepancy = false;
    double delta = 0.0;
    double tau = 0.0;
};

struct LandweberResult {
    Vector x;                 // final iterate
    std::size_t steps = 0;    // number of steps performed
    Vector residual_norms;    // ||A x_m - y||, m = 0..steps
    bool discrepancy_met = false;
};

// Linear Landweber iteration x_m = x_{m-1} + omega A^T (y - A x_{m-1}), x_0 = 0.
// Requires 0 < omega < 1/sigma_1^2.
LandweberResult landweber_run(const Matrix& a, const Vector& y, double omega,
                              const LandweberStop& stop);

// Same iteration evaluated in singular coordinates; identical iterates, O(rank)
// per step. Used for long discrepancy sweeps.
LandweberResult landweber_run(const SingularSystem& sys, const Vector& y, double omega,
                              const LandweberStop& stop);

// Log-log slope of omega_nu(alpha) = sup_lambda lambda^(nu/2) |r_alpha(lambda)|
// over the given alpha grid; lambda sampled on a 2000-point log grid.
double qualification_scan(const Filter& filter, double nu, const Vector& alphas,
                          double lambda_max);

struct ValueFunctions {
    Vector alphas;
    Vector f;  // 0.5 ||A x_alpha - y||^2
    Vector g;  // 0.5 ||x_alpha||^2
    Vector j;  // f + alpha * g
};

// Tikhonov value functions on a strictly increasing alpha grid; monotonicity
// of f and g is asserted (throws std::runtime_error on violation).
ValueFunctions value_functions(const Matrix& a, const Vector& y_delta,
                               const Vector& alphas);

}  // namespace illposed
