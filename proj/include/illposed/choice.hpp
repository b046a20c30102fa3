#pragma once

#include <functional>
#include <string>

#include "illposed/linalg.hpp"

namespace illposed {

struct ChoiceOutcome {
    double alpha_selected = 0.0;
    std::size_t index = 0;       // position in the scanned grid
    std::string rule;
    double residual_at_selection = 0.0;
    Vector scan_values;          // rule-specific values over the grid
    bool flagged = false;        // boundary condition hit (see each rule)
};

// a priori power rule alpha = c * (delta/rho)^(2/(nu+1)).
double apriori_alpha(double delta, double rho, double nu, double c);

// Sequential discrepancy principle over a strictly decreasing alpha grid:
// returns the first grid alpha with ||A x_alpha - y|| <= tau*delta.
// If the largest alpha already satisfies the bound, it is returned flagged.
// Throws std::runtime_error if the grid is exhausted.
ChoiceOutcome morozov(const Matrix& a, const Vector& y_delta, double delta, double tau,
                      const Vector& alphas,
                      const std::function<Vector(double)>& solver);

// argmin_n ||x_{alpha_{n+1}} - x_{alpha_n}||; ties break to the larger alpha.
ChoiceOutcome quasi_optimality(const Vector& alphas,
                               const std::vector<Vector>& solutions);

// argmin of Psi(alpha) = residual / sqrt(alpha); ties break to the larger alpha.
ChoiceOutcome hanke_raus(const Vector& alphas, const Vector& residuals);

// argmin of ||x_alpha|| * residual; ties break to the larger alpha.
ChoiceOutcome l_curve(const Vector& alphas, const Vector& residuals,
                      const Vector& solution_norms);

// Geometric grid alpha_0 * q^k, k = 0..count-1.
Vector geometric_grid(double alpha0, double q, std::size_t count);

}  // namespace illposed
