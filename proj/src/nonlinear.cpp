#include "illposed/nonlinear.hpp"

#include <cmath>

namespace illposed {

namespace {

double fit_slope(const Vector& logx, const Vector& logy) {
    double mx = 0.0, my = 0.0;
    const double n = static_cast<double>(logx.size());
    for (std::size_t i = 0; i < logx.size(); ++i) {
        mx += logx[i];
        my += logy[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < logx.size(); ++i) {
        sxx += (logx[i] - mx) * (logx[i] - mx);
        sxy += (logx[i] - mx) * (logy[i] - my);
    }
    return sxy / sxx;
}

double operator_norm(const Matrix& t) {
    Vector v(t.cols(), 1.0);
    double lambda = 0.0;
    for (int it = 0; it < 100; ++it) {
        Vector w = mul_transposed(t, t * v);
        const double nrm = norm2(w);
        if (nrm == 0.0) return 0.0;
        lambda = nrm;
        for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / nrm;
    }
    return std::sqrt(lambda);
}

void check_domain(const NonlinearProblem& p, const Vector& x) {
    if (norm2(x) > p.domain_radius)
        throw std::runtime_error("evaluation outside the problem's admissible domain");
}

}  // namespace

DerivativeCheck check_derivative(const NonlinearProblem& p, const Vector& x,
                                 const Vector& direction, const Vector& scales) {
    check_domain(p, x);
    const double dn = norm2(direction);
    if (dn == 0.0) throw std::invalid_argument("check_derivative: zero direction");
    const Vector fx = p.forward(x);
    const Matrix dfx = p.derivative(x);
    const double fscale = 1.0 + norm2(fx);

    Vector log_h, log_r;
    bool all_tiny = true;
    for (double s : scales) {
        Vector h = (s / dn) * direction;
        Vector xh = x + h;
        check_domain(p, xh);
        const Vector rem = p.forward(xh) - fx - dfx * h;
        const double rn = norm2(rem);
        if (rn > 1e-12 * fscale) {
            all_tiny = false;
            log_h.push_back(std::log(s));
            log_r.push_back(std::log(rn));
        }
    }
    DerivativeCheck out;
    if (all_tiny) {
        out.exact = true;
        return out;
    }
    if (log_h.size() < 2)
        throw std::runtime_error("check_derivative: too few usable scales");
    out.slope = fit_slope(log_h, log_r);
    return out;
}

NonlinearityProbe tangential_cone_probe(const NonlinearProblem& p, const Vector& x,
                                        double radius, std::size_t samples,
                                        RandomSource& src) {
    if (radius > p.domain_radius)
        throw std::invalid_argument("tangential_cone_probe: radius exceeds domain");
    const Vector fx = p.forward(x);
    const Matrix dfx = p.derivative(x);
    NonlinearityProbe probe;
    for (std::size_t s = 0; s < samples; ++s) {
        Vector h = gaussian_vector(src, p.dim_in);
        const double scale = radius * src.uniform01() / norm2(h);
        for (double& v : h) v *= scale;
        const Vector fxh = p.forward(x + h);
        const Vector rem = fxh - fx - dfx * h;
        const double rn = norm2(rem);
        const double dn = norm2(fxh - fx);
        const double hn2 = dot(h, h);
        if (dn > 1e-14) probe.eta_estimate = std::max(probe.eta_estimate, rn / dn);
        if (hn2 > 0.0)
            probe.lipschitz_estimate = std::max(probe.lipschitz_estimate, 2.0 * rn / hn2);
    }
    return probe;
}

namespace {

// Damped Gauss-Newton on J_alpha anchored at x0, starting from `start`.
Vector nl_tikhonov_from(const NonlinearProblem& p, const Vector& y_delta, double alpha,
                        const Vector& x0, const Vector& start, std::size_t max_inner) {
    if (!(alpha > 0.0)) throw std::invalid_argument("nl_tikhonov: alpha must be > 0");
    const double grad_tol = 1e-8 * (1.0 + norm2(y_delta));

    auto objective = [&](const Vector& x) {
        const Vector r = p.forward(x) - y_delta;
        const Vector d = x - x0;
        return 0.5 * dot(r, r) + 0.5 * alpha * dot(d, d);
    };

    Vector x = start;
    for (std::size_t it = 0; it < max_inner; ++it) {
        const Vector r = p.forward(x) - y_delta;
        const Matrix t = p.derivative(x);
        Vector grad = mul_transposed(t, r);
        axpy(alpha, x - x0, grad);
        if (norm2(grad) <= grad_tol) return x;

        // Gauss-Newton step on the regularized normal equations
        const std::size_t n = p.dim_in;
        Matrix normal(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < t.rows(); ++k) s += t(k, i) * t(k, j);
                normal(i, j) = s;
                normal(j, i) = s;
            }
        for (std::size_t i = 0; i < n; ++i) normal(i, i) += alpha;
        const Vector step = solve_spd(normal, -1.0 * grad);

        const double j0 = objective(x);
        const double slope = dot(grad, step);  // negative for a descent step
        double lam = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            Vector cand = x;
            axpy(lam, step, cand);
            if (norm2(cand) <= p.domain_radius &&
                objective(cand) <= j0 + 1e-4 * lam * slope) {
                x = std::move(cand);
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        if (!accepted)
            throw std::runtime_error("nl_tikhonov: line search failed");
    }
    // one last tolerance check before giving up
    {
        const Vector r = p.forward(x) - y_delta;
        Vector grad = mul_transposed(p.derivative(x), r);
        axpy(alpha, x - x0, grad);
        if (norm2(grad) <= grad_tol) return x;
    }
    throw std::runtime_error("nl_tikhonov: iteration budget exhausted before gradient tolerance");
}

}  // namespace

Vector nl_tikhonov(const NonlinearProblem& p, const Vector& y_delta, double alpha,
                   const Vector& x0, std::size_t max_inner) {
    return nl_tikhonov_from(p, y_delta, alpha, x0, x0, max_inner);
}

DiscrepancySearchResult nl_tikhonov_discrepancy(const NonlinearProblem& p,
                                                const Vector& y_delta, double delta,
                                                double tau, const Vector& x0,
                                                const Vector& alphas) {
    if (!(tau > 1.0)) throw std::invalid_argument("nl_tikhonov_discrepancy: tau must be > 1");
    DiscrepancySearchResult out;
    if (norm2(p.forward(x0) - y_delta) <= tau * delta) {
        out.x = x0;
        out.x0_acceptable = true;
        return out;
    }
    Vector guess = x0;
    for (double alpha : alphas) {
        // warm start from the previous minimizer; the functional stays
        // anchored at x0
        const Vector x = nl_tikhonov_from(p, y_delta, alpha, x0, guess, 200);
        guess = x;
        if (norm2(p.forward(x) - y_delta) <= tau * delta) {
            out.alpha = alpha;
            out.x = x;
            return out;
        }
    }
    throw std::runtime_error("nl_tikhonov_discrepancy: alpha grid exhausted");
}

IterationTrace nl_landweber(const NonlinearProblem& p, const Vector& y_delta,
                            double delta, double tau, const Vector& x0,
                            std::size_t max_iter,
                            const std::optional<Vector>& reference) {
    IterationTrace tr;
    // rescale so ||F'(x0)|| <= 1 with some margin
    const double m0 = operator_norm(p.derivative(x0));
    const double scale = (m0 > 1.0) ? 0.9 / m0 : 1.0;
    tr.rescale_factor = scale;
    const double s2 = scale * scale;

    Vector x = x0;
    Vector r = y_delta - p.forward(x);
    tr.residual_norms.push_back(norm2(r));
    if (reference) tr.error_norms.push_back(norm2(x - *reference));
    const double threshold = tau * delta;

    double error_min = reference ? tr.error_norms.back() : 0.0;
    int above_min = 0;

    std::size_t n = 0;
    tr.stop_reason = StopReason::max_iter;
    if (tr.residual_norms.back() <= threshold) {
        tr.stop_reason = StopReason::discrepancy;
    } else {
        while (n < max_iter) {
            axpy(s2, mul_transposed(p.derivative(x), r), x);
            ++n;
            r = y_delta - p.forward(x);
            tr.residual_norms.push_back(norm2(r));
            if (reference) {
                const double err = norm2(x - *reference);
                tr.error_norms.push_back(err);
                if (err < error_min) {
                    error_min = err;
                    above_min = 0;
                } else if (err > 2.0 * error_min) {
                    if (++above_min >= 10)
                        throw std::runtime_error("nl_landweber: divergence detected (error doubled from its minimum)");
                } else {
                    above_min = 0;
                }
            }
            if (tr.residual_norms.back() <= threshold) {
                tr.stop_reason = StopReason::discrepancy;
                break;
            }
        }
    }
    tr.x = std::move(x);
    tr.N = n;
    return tr;
}

IterationTrace levenberg_marquardt(const NonlinearProblem& p, const Vector& y_delta,
                                   double delta, double tau, double sigma,
                                   const Vector& x0, std::size_t max_iter,
                                   const std::optional<Vector>& reference) {
    if (!(sigma > 0.0) || !(sigma < 1.0))
        throw std::invalid_argument("levenberg_marquardt: sigma must lie in (0,1)");

    IterationTrace tr;
    Vector x = x0;
    tr.residual_norms.push_back(norm2(p.forward(x) - y_delta));
    if (reference) tr.error_norms.push_back(norm2(x - *reference));
    const double threshold = tau * delta;

    std::size_t n = 0;
    tr.stop_reason = StopReason::max_iter;
    while (tr.residual_norms.back() > threshold && n < max_iter) {
        const Vector r = y_delta - p.forward(x);
        const double rn = norm2(r);
        const Matrix t = p.derivative(x);
        const SingularSystem ts = svd(t);

        // residual of the linearized step at regularization alpha:
        //   ||T h_alpha - r||^2 = sum (alpha/(s_i^2+alpha))^2 c_i^2 + ||r_perp||^2
        Vector c(ts.rank);
        double csum = 0.0;
        for (std::size_t i = 0; i < ts.rank; ++i) {
            double ci = 0.0;
            for (std::size_t k = 0; k < ts.U.rows(); ++k) ci += ts.U(k, i) * r[k];
            c[i] = ci;
            csum += ci * ci;
        }
        const double perp2 = std::max(dot(r, r) - csum, 0.0);
        auto lin_residual = [&](double alpha) {
            double s = perp2;
            for (std::size_t i = 0; i < ts.rank; ++i) {
                const double f = alpha / (ts.sigma[i] * ts.sigma[i] + alpha);
                s += f * f * c[i] * c[i];
            }
            return std::sqrt(s);
        };

        const double target = sigma * rn;
        const double s1sq = ts.sigma[0] * ts.sigma[0];
        double lo = 1e-12 * s1sq, hi = 1e12 * s1sq;
        if (lin_residual(lo) > target || lin_residual(hi) < target)
            throw std::runtime_error(
                "levenberg_marquardt: alpha rule target " + std::to_string(target) +
                " outside attainable range [" + std::to_string(lin_residual(lo)) + ", " +
                std::to_string(lin_residual(hi)) + "]");
        double alpha = 0.0;
        for (int it = 0; it < 200; ++it) {
            alpha = std::sqrt(lo * hi);  // bisection on log alpha
            const double f = lin_residual(alpha);
            if (std::abs(f - target) <= 1e-12 * rn) break;
            if (f < target)
                lo = alpha;
            else
                hi = alpha;
        }
        tr.alphas.push_back(alpha);
        tr.lin_residual_ratios.push_back(lin_residual(alpha) / rn);

        for (std::size_t i = 0; i < ts.rank; ++i) {
            const double coef = ts.sigma[i] / (ts.sigma[i] * ts.sigma[i] + alpha) * c[i];
            for (std::size_t k = 0; k < ts.V.rows(); ++k) x[k] += coef * ts.V(k, i);
        }
        ++n;
        tr.residual_norms.push_back(norm2(p.forward(x) - y_delta));
        if (reference) tr.error_norms.push_back(norm2(x - *reference));
    }
    if (tr.residual_norms.back() <= threshold) tr.stop_reason = StopReason::discrepancy;
    tr.x = std::move(x);
    tr.N = n;
    return tr;
}

IterationTrace irgn(const NonlinearProblem& p, const Vector& y_delta, double delta,
                    double tau, const Vector& x0, double alpha0, double q, double nu,
                    std::size_t max_iter,
                    const std::optional<Vector>& reference) {
    if (!(q > 1.0)) throw std::invalid_argument("irgn: q must be > 1");
    if (!(tau > 0.0)) throw std::invalid_argument("irgn: tau must be > 0");
    if (nu < 1.0 || nu > 2.0) throw std::invalid_argument("irgn: nu must lie in [1,2]");

    IterationTrace tr;
    Vector x = x0;
    tr.residual_norms.push_back(norm2(p.forward(x) - y_delta));
    if (reference) tr.error_norms.push_back(norm2(x - *reference));

    const double expo = (nu + 1.0) / 2.0;
    std::size_t n = 0;
    double alpha = alpha0;
    while (std::pow(alpha, expo) > tau * delta) {
        if (n >= max_iter)
            throw std::runtime_error("irgn: iteration budget exhausted before the a priori stop");
        const Vector r = y_delta - p.forward(x);
        const Matrix t = p.derivative(x);
        const std::size_t dim = p.dim_in;
        Matrix normal(dim, dim);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = i; j < dim; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < t.rows(); ++k) s += t(k, i) * t(k, j);
                normal(i, j) = s;
                normal(j, i) = s;
            }
        for (std::size_t i = 0; i < dim; ++i) normal(i, i) += alpha;
        Vector rhs = mul_transposed(t, r);
        axpy(alpha, x0 - x, rhs);
        const Vector h = solve_spd(normal, rhs);
        x = x + h;
        tr.alphas.push_back(alpha);
        ++n;
        tr.residual_norms.push_back(norm2(p.forward(x) - y_delta));
        if (reference) tr.error_norms.push_back(norm2(x - *reference));
        alpha = alpha0 * std::pow(q, -static_cast<double>(n));
    }
    tr.stop_reason = StopReason::discrepancy;
    tr.x = std::move(x);
    tr.N = n;
    return tr;
}

}  // namespace illposed
