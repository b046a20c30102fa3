#include "illposed/spectral.hpp"

#include <cmath>

namespace illposed {

namespace {

double landweber_phi(double omega, double alpha, double lambda) {
    const double m = 1.0 / alpha;
    if (lambda == 0.0) return omega * m;  // limit of (1-(1-w*l)^m)/l
    return (1.0 - std::pow(1.0 - omega * lambda, m)) / lambda;
}

void require_landweber_alpha(double alpha) {
    const double m = 1.0 / alpha;
    if (std::abs(m - std::round(m)) > 1e-9 * m || std::round(m) < 1.0)
        throw std::invalid_argument("landweber filter: alpha must be 1/m for a positive integer m");
}

// Largest singular value estimate via power iteration on A^T A.
double spectral_norm_estimate(const Matrix& a) {
    Vector v(a.cols(), 1.0);
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        Vector w = mul_transposed(a, a * v);
        const double nrm = norm2(w);
        if (nrm == 0.0) return 0.0;
        lambda = nrm;
        for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / nrm;
    }
    return std::sqrt(lambda);
}

}  // namespace

Filter make_tsvd_filter() {
    Filter f;
    f.name = "tsvd";
    f.phi = [](double alpha, double lambda) {
        return lambda >= alpha ? 1.0 / lambda : 0.0;
    };
    f.r = [](double alpha, double lambda) { return lambda >= alpha ? 0.0 : 1.0; };
    f.C_phi = 1.0;
    f.qualification = std::numeric_limits<double>::infinity();
    return f;
}

Filter make_tikhonov_filter() {
    Filter f;
    f.name = "tikhonov";
    f.phi = [](double alpha, double lambda) { return 1.0 / (lambda + alpha); };
    f.r = [](double alpha, double lambda) { return alpha / (lambda + alpha); };
    f.C_phi = 1.0;
    f.qualification = 2.0;
    return f;
}

Filter make_landweber_filter(double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("landweber filter: omega must be > 0");
    Filter f;
    f.name = "landweber";
    f.omega = omega;
    f.phi = [omega](double alpha, double lambda) {
        require_landweber_alpha(alpha);
        return landweber_phi(omega, alpha, lambda);
    };
    f.r = [omega](double alpha, double lambda) {
        require_landweber_alpha(alpha);
        return std::pow(1.0 - omega * lambda, 1.0 / alpha);
    };
    f.C_phi = 1.0;
    f.qualification = std::numeric_limits<double>::infinity();
    return f;
}

Vector filter_apply(const Filter& filter, double alpha, const SingularSystem& sys,
                    const Vector& y) {
    if (!(alpha > 0.0)) throw std::invalid_argument("filter_apply: alpha must be > 0");
    if (filter.name == "landweber") require_landweber_alpha(alpha);
    Vector x(sys.V.rows(), 0.0);
    for (std::size_t n = 0; n < sys.rank; ++n) {
        double c = 0.0;
        for (std::size_t i = 0; i < sys.U.rows(); ++i) c += sys.U(i, n) * y[i];
        c *= filter.phi(alpha, sys.sigma[n] * sys.sigma[n]) * sys.sigma[n];
        for (std::size_t i = 0; i < sys.V.rows(); ++i) x[i] += c * sys.V(i, n);
    }
    return x;
}

Vector tikhonov_solve(const Matrix& a, const Vector& y, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("tikhonov_solve: alpha must be > 0");
    const std::size_t n = a.cols();
    Matrix normal(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.rows(); ++k) s += a(k, i) * a(k, j);
            normal(i, j) = s;
            normal(j, i) = s;
        }
    for (std::size_t i = 0; i < n; ++i) normal(i, i) += alpha;
    return solve_spd(normal, mul_transposed(a, y));
}

LandweberResult landweber_run(const Matrix& a, const Vector& y, double omega,
                              const LandweberStop& stop) {
    const double sigma1 = spectral_norm_estimate(a);
    if (!(omega > 0.0) || !(omega < 1.0 / (sigma1 * sigma1)))
        throw std::invalid_argument("landweber_run: omega must lie in (0, 1/sigma_1^2)");

    LandweberResult res;
    res.x.assign(a.cols(), 0.0);
    Vector r = y;  // residual y - A x
    res.residual_norms.push_back(norm2(r));
    const double threshold = stop.use_discrepancy ? stop.tau * stop.delta : -1.0;
    if (stop.use_discrepancy && res.residual_norms.back() <= threshold) {
        res.discrepancy_met = true;
        return res;
    }
    for (std::size_t m = 1; m <= stop.max_iter; ++m) {
        axpy(omega, mul_transposed(a, r), res.x);
        r = y - a * res.x;
        res.steps = m;
        res.residual_norms.push_back(norm2(r));
        if (stop.use_discrepancy && res.residual_norms.back() <= threshold) {
            res.discrepancy_met = true;
            break;
        }
    }
    return res;
}

LandweberResult landweber_run(const SingularSystem& sys, const Vector& y, double omega,
                              const LandweberStop& stop) {
    const double sigma1 = sys.sigma.empty() ? 0.0 : sys.sigma[0];
    if (!(omega > 0.0) || !(omega < 1.0 / (sigma1 * sigma1)))
        throw std::invalid_argument("landweber_run: omega must lie in (0, 1/sigma_1^2)");

    const std::size_t r = sys.rank;
    Vector yc(r);       // <y, u_n>
    for (std::size_t n = 0; n < r; ++n) {
        double c = 0.0;
        for (std::size_t i = 0; i < sys.U.rows(); ++i) c += sys.U(i, n) * y[i];
        yc[n] = c;
    }
    double perp2 = dot(y, y);
    for (double c : yc) perp2 -= c * c;
    perp2 = std::max(perp2, 0.0);  // ||y - U U^T y||^2

    // residual coefficient after m steps is (1 - omega sigma_n^2)^m <y,u_n>
    Vector decay(r), resc(r);
    for (std::size_t n = 0; n < r; ++n) {
        decay[n] = 1.0 - omega * sys.sigma[n] * sys.sigma[n];
        resc[n] = yc[n];
    }
    auto residual = [&]() {
        double s = perp2;
        for (double c : resc) s += c * c;
        return std::sqrt(s);
    };

    LandweberResult res;
    res.residual_norms.push_back(residual());
    const double threshold = stop.use_discrepancy ? stop.tau * stop.delta : -1.0;
    std::size_t steps = 0;
    bool met = stop.use_discrepancy && res.residual_norms.back() <= threshold;
    while (!met && steps < stop.max_iter) {
        ++steps;
        for (std::size_t n = 0; n < r; ++n) resc[n] *= decay[n];
        res.residual_norms.push_back(residual());
        if (stop.use_discrepancy && res.residual_norms.back() <= threshold) met = true;
    }
    res.steps = steps;
    res.discrepancy_met = met;

    res.x.assign(sys.V.rows(), 0.0);
    for (std::size_t n = 0; n < r; ++n) {
        const double c = (yc[n] - resc[n]) / sys.sigma[n];  // (1-(1-ws^2)^m)/s <y,u>
        for (std::size_t i = 0; i < sys.V.rows(); ++i) res.x[i] += c * sys.V(i, n);
    }
    return res;
}

double qualification_scan(const Filter& filter, double nu, const Vector& alphas,
                          double lambda_max) {
    if (!(nu > 0.0)) throw std::invalid_argument("qualification_scan: nu must be > 0");
    if (alphas.size() < 2) throw std::invalid_argument("qualification_scan: need >= 2 alphas");

    const std::size_t n_lambda = 2000;
    const double lmin = lambda_max * 1e-12;
    Vector log_alpha, log_omega;
    for (double alpha : alphas) {
        double sup = 0.0;
        for (std::size_t k = 0; k < n_lambda; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(n_lambda - 1);
            const double lambda = lmin * std::pow(lambda_max / lmin, t);
            const double val = std::pow(lambda, nu / 2.0) * std::abs(filter.r(alpha, lambda));
            sup = std::max(sup, val);
        }
        if (sup > 0.0) {
            log_alpha.push_back(std::log(alpha));
            log_omega.push_back(std::log(sup));
        }
    }
    if (log_alpha.size() < 2)
        throw std::runtime_error("qualification_scan: omega_nu vanished on the whole grid");

    // least-squares slope
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < log_alpha.size(); ++i) {
        mx += log_alpha[i];
        my += log_omega[i];
    }
    mx /= static_cast<double>(log_alpha.size());
    my /= static_cast<double>(log_alpha.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < log_alpha.size(); ++i) {
        sxx += (log_alpha[i] - mx) * (log_alpha[i] - mx);
        sxy += (log_alpha[i] - mx) * (log_omega[i] - my);
    }
    return sxy / sxx;
}

ValueFunctions value_functions(const Matrix& a, const Vector& y_delta,
                               const Vector& alphas) {
    for (std::size_t i = 1; i < alphas.size(); ++i)
        if (!(alphas[i] > alphas[i - 1]))
            throw std::invalid_argument("value_functions: alphas must be strictly increasing");

    ValueFunctions vf;
    vf.alphas = alphas;
    for (double alpha : alphas) {
        const Vector x = tikhonov_solve(a, y_delta, alpha);
        const Vector r = a * x - y_delta;
        const double f = 0.5 * dot(r, r);
        const double g = 0.5 * dot(x, x);
        vf.f.push_back(f);
        vf.g.push_back(g);
        vf.j.push_back(f + alpha * g);
    }
    const double scale = 1.0 + dot(y_delta, y_delta);
    for (std::size_t i = 1; i < vf.f.size(); ++i) {
        if (vf.f[i] < vf.f[i - 1] - 1e-12 * scale)
            throw std::runtime_error("value_functions: f not nondecreasing in alpha");
        if (vf.g[i] > vf.g[i - 1] + 1e-12 * scale)
            throw std::runtime_error("value_functions: g not nonincreasing in alpha");
    }
    return vf;
}

}  // namespace illposed
