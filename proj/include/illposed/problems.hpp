#pragma once

#include <functional>
#include <optional>

#include "illposed/linalg.hpp"

namespace illposed {

// Closed-form singular system of a model operator, sampled on the grid and
// scaled to unit Euclidean norm.
struct AnalyticSystem {
    std::function<double(std::size_t)> sigma;             // sigma_k, k = 1,2,...
    std::function<Vector(std::size_t)> u;                 // discrete u_k, unit norm
    std::function<Vector(std::size_t)> v;                 // discrete v_k, unit norm
};

struct LinearProblem {
    Matrix A;
    std::size_t n = 0;
    Vector grid;  // midpoint nodes t_i in (0,1)
    std::optional<AnalyticSystem> analytic_system;
};

struct NonlinearProblem {
    std::size_t dim_in = 0;
    std::size_t dim_out = 0;
    std::function<Vector(const Vector&)> forward;
    std::function<Matrix(const Vector&)> derivative;
    double domain_radius = 0.0;  // evaluation admitted in this ball around 0
};

struct GroundTruth {
    Vector x_dag;
    double nu = 0.0;
    double rho = 0.0;
    Vector w;
};

// Volterra integration operator on the midpoint grid; h/2 on the diagonal so
// (Ax)_i approximates the integral of x up to the cell midpoint t_i.
LinearProblem make_integration_operator(std::size_t n);

// A_ij = h * kernel(t_j, t_i): Fredholm operator of the first kind with the
// full h weight everywhere (no analytic system attached).
LinearProblem make_kernel_operator(std::size_t n,
                                   const std::function<double(double, double)>& kernel);

// x_dag = |K|^nu w, rho = ||w||; realizes the source condition on the
// discrete spectrum.
GroundTruth make_ground_truth(const LinearProblem& problem, double nu, const Vector& w);
GroundTruth make_ground_truth(const SingularSystem& sys, double nu, const Vector& w);

// y + delta * xi/||xi||: noisy data at exact distance delta.
Vector add_noise_exact(const Vector& y, double delta, RandomSource& src);

// F(x)_i = h * sum_{j<=i} x_j x_{i-j+1}, the discrete autoconvolution.
NonlinearProblem make_autoconvolution(std::size_t n);

// F(x)_k = sigma_k (x_k + c x_k^3): diagonal operator with controllable
// nonlinearity and an exact diagonal derivative.
NonlinearProblem make_diagonal_cubic(const Vector& sigma, double c);

}  // namespace illposed
