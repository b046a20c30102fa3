#include "illposed/problems.hpp"

#include <cmath>

#include "illposed/pinv.hpp"

namespace illposed {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

Vector sampled_unit(std::size_t n, const std::function<double(double)>& f,
                    const Vector& grid) {
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(grid[i]);
    const double nrm = norm2(v);
    if (nrm > 0.0)
        for (double& x : v) x /= nrm;
    return v;
}
}  // namespace

LinearProblem make_integration_operator(std::size_t n) {
    if (n < 4) throw std::invalid_argument("make_integration_operator: need n >= 4");
    LinearProblem p;
    p.n = n;
    const double h = 1.0 / static_cast<double>(n);
    p.grid.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.grid[i] = (static_cast<double>(i) + 0.5) * h;

    p.A = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) p.A(i, j) = h;
        p.A(i, i) = h / 2.0;
    }

    AnalyticSystem sys;
    const Vector grid = p.grid;
    sys.sigma = [](std::size_t k) {
        return 2.0 / ((2.0 * static_cast<double>(k) - 1.0) * kPi);
    };
    sys.v = [n, grid](std::size_t k) {
        const double w = (static_cast<double>(k) - 0.5) * kPi;
        return sampled_unit(n, [w](double t) { return std::sqrt(2.0) * std::cos(w * t); },
                            grid);
    };
    sys.u = [n, grid](std::size_t k) {
        const double w = (static_cast<double>(k) - 0.5) * kPi;
        return sampled_unit(n, [w](double t) { return std::sqrt(2.0) * std::sin(w * t); },
                            grid);
    };
    p.analytic_system = std::move(sys);
    return p;
}

LinearProblem make_kernel_operator(std::size_t n,
                                   const std::function<double(double, double)>& kernel) {
    if (n < 1) throw std::invalid_argument("make_kernel_operator: need n >= 1");
    LinearProblem p;
    p.n = n;
    const double h = 1.0 / static_cast<double>(n);
    p.grid.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.grid[i] = (static_cast<double>(i) + 0.5) * h;
    p.A = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) p.A(i, j) = h * kernel(p.grid[j], p.grid[i]);
    if (!p.A.all_finite())
        throw std::invalid_argument("make_kernel_operator: kernel produced non-finite values");
    return p;
}

GroundTruth make_ground_truth(const SingularSystem& sys, double nu, const Vector& w) {
    if (nu < 0.0) throw std::invalid_argument("make_ground_truth: nu must be >= 0");
    GroundTruth gt;
    gt.nu = nu;
    gt.w = w;
    gt.rho = norm2(w);
    gt.x_dag = operator_power(sys, nu, w);
    return gt;
}

GroundTruth make_ground_truth(const LinearProblem& problem, double nu, const Vector& w) {
    return make_ground_truth(svd(problem.A), nu, w);
}

Vector add_noise_exact(const Vector& y, double delta, RandomSource& src) {
    if (delta < 0.0) throw std::invalid_argument("add_noise_exact: delta must be >= 0");
    if (delta == 0.0) return y;
    Vector xi = gaussian_vector(src, y.size());
    const double nrm = norm2(xi);
    Vector out = y;
    axpy(delta / nrm, xi, out);
    return out;
}

NonlinearProblem make_autoconvolution(std::size_t n) {
    if (n < 4) throw std::invalid_argument("make_autoconvolution: need n >= 4");
    NonlinearProblem p;
    p.dim_in = n;
    p.dim_out = n;
    p.domain_radius = 10.0;
    const double h = 1.0 / static_cast<double>(n);
    p.forward = [n, h](const Vector& x) {
        Vector y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j <= i; ++j) s += x[j] * x[i - j];
            y[i] = h * s;
        }
        return y;
    };
    p.derivative = [n, h](const Vector& x) {
        // (F'(x)h)_i = 2h sum_{j<=i} x_{i-j} h_j
        Matrix d(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) d(i, j) = 2.0 * h * x[i - j];
        return d;
    };
    return p;
}

NonlinearProblem make_diagonal_cubic(const Vector& sigma, double c) {
    for (double s : sigma)
        if (!(s > 0.0)) throw std::invalid_argument("make_diagonal_cubic: all sigma_k must be > 0");
    const std::size_t n = sigma.size();
    NonlinearProblem p;
    p.dim_in = n;
    p.dim_out = n;
    p.domain_radius = 100.0;
    p.forward = [sigma, c, n](const Vector& x) {
        Vector y(n);
        for (std::size_t k = 0; k < n; ++k) y[k] = sigma[k] * (x[k] + c * x[k] * x[k] * x[k]);
        return y;
    };
    p.derivative = [sigma, c, n](const Vector& x) {
        Matrix d(n, n);
        for (std::size_t k = 0; k < n; ++k) d(k, k) = sigma[k] * (1.0 + 3.0 * c * x[k] * x[k]);
        return d;
    };
    return p;
}

}  // namespace illposed
