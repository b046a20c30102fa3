#include "illposed/bayes.hpp"

#include <cmath>

namespace illposed {

namespace {

Matrix regularized_normal_matrix(const Matrix& t, double alpha) {
    const std::size_t n = t.cols();
    Matrix normal(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < t.rows(); ++k) s += t(k, i) * t(k, j);
            normal(i, j) = s;
            normal(j, i) = s;
        }
    for (std::size_t i = 0; i < n; ++i) normal(i, i) += alpha;
    return normal;
}

}  // namespace

Vector map_estimate(const Matrix& t, const Vector& y_delta, double delta,
                    double sigma_prior) {
    if (!(delta > 0.0) || !(sigma_prior > 0.0))
        throw std::invalid_argument("map_estimate: delta and sigma_prior must be > 0");
    const double alpha = delta * delta / (sigma_prior * sigma_prior);
    return solve_spd(regularized_normal_matrix(t, alpha), mul_transposed(t, y_delta));
}

GaussianPosterior posterior(const Matrix& t, const Vector& y_delta, double delta,
                            double sigma_prior) {
    if (!(delta > 0.0) || !(sigma_prior > 0.0))
        throw std::invalid_argument("posterior: delta and sigma_prior must be > 0");
    const double alpha = delta * delta / (sigma_prior * sigma_prior);
    const Matrix normal = regularized_normal_matrix(t, alpha);
    const std::size_t n = t.cols();

    GaussianPosterior post;
    post.delta = delta;
    post.sigma_prior = sigma_prior;
    post.mean = solve_spd(normal, mul_transposed(t, y_delta));
    post.covariance = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        Vector e(n, 0.0);
        e[j] = delta * delta;
        const Vector col = solve_spd(normal, e);
        for (std::size_t i = 0; i < n; ++i) post.covariance(i, j) = col[i];
    }
    // symmetrize away the last rounding
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (post.covariance(i, j) + post.covariance(j, i));
            post.covariance(i, j) = v;
            post.covariance(j, i) = v;
        }
    return post;
}

PosteriorSampler::PosteriorSampler(const GaussianPosterior& post) : mean_(post.mean) {
    const SingularSystem s = svd(post.covariance);
    const std::size_t n = post.covariance.rows();
    sqrt_cov_ = Matrix(n, n);
    // symmetric square root U diag(sqrt sigma) U^T
    for (std::size_t k = 0; k < s.rank; ++k) {
        const double r = std::sqrt(s.sigma[k]);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                sqrt_cov_(i, j) += r * s.U(i, k) * s.U(j, k);
    }
}

Vector PosteriorSampler::sample(RandomSource& src) const {
    const Vector xi = gaussian_vector(src, mean_.size());
    Vector x = sqrt_cov_ * xi;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += mean_[i];
    return x;
}

CmResult cm_monte_carlo(const Matrix& t, const Vector& y_delta, double delta,
                        double sigma_prior, std::size_t n_samples, RandomSource& src) {
    if (n_samples < 2) throw std::invalid_argument("cm_monte_carlo: need n_samples >= 2");
    const std::size_t n = t.cols();

    std::vector<Vector> xs(n_samples);
    Vector energy(n_samples);
    double emin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_samples; ++i) {
        Vector x = gaussian_vector(src, n);
        for (double& v : x) v *= sigma_prior;
        const Vector r = t * x - y_delta;
        energy[i] = dot(r, r) / (2.0 * delta * delta);
        emin = std::min(emin, energy[i]);
        xs[i] = std::move(x);
    }
    if (!std::isfinite(emin) || emin > 700.0)
        throw std::runtime_error(
            "cm_monte_carlo: all importance weights underflow; "
            "increase delta or the sample count");

    CmResult res;
    res.estimate.assign(n, 0.0);
    double wsum = 0.0, wmax = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        // self-normalized weights are invariant under the common shift
        const double w = std::exp(-(energy[i] - emin));
        wsum += w;
        wmax = std::max(wmax, w);
        axpy(w, xs[i], res.estimate);
    }
    for (double& v : res.estimate) v /= wsum;
    res.weight_sum = wsum;
    res.effective_sample_size = wsum / wmax;
    return res;
}

double regularized_gamma_p(double s, double x) {
    if (x < 0.0 || s <= 0.0) throw std::invalid_argument("regularized_gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(s);
    if (x < s + 1.0) {
        // series expansion
        double term = 1.0 / s;
        double sum = term;
        double ap = s;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + s * std::log(x) - lg);
    }
    // continued fraction for Q(s,x), modified Lentz
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + s * std::log(x) - lg) * h;
    return 1.0 - q;
}

double chi_square_quantile(std::size_t dof, double p) {
    if (dof == 0 || !(p >= 0.0) || !(p < 1.0))
        throw std::invalid_argument("chi_square_quantile: need dof >= 1, p in [0,1)");
    if (p == 0.0) return 0.0;
    const double s = static_cast<double>(dof) / 2.0;
    double lo = 0.0, hi = static_cast<double>(dof);
    while (regularized_gamma_p(s, hi / 2.0) < p) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (regularized_gamma_p(s, mid / 2.0) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

HpdSet hpd_credible_set(const GaussianPosterior& post, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("hpd_credible_set: alpha must lie in (0,1)");
    const std::size_t n = post.covariance.rows();
    HpdSet set;
    const double r2 = chi_square_quantile(n, 1.0 - alpha);
    set.mahalanobis_radius = std::sqrt(r2);

    // -log density on the boundary: 0.5 r^2 + 0.5 log((2 pi)^N det C)
    const Matrix l = cholesky(post.covariance);
    double logdet = 0.0;
    for (std::size_t i = 0; i < n; ++i) logdet += 2.0 * std::log(l(i, i));
    set.eta_threshold =
        0.5 * r2 + 0.5 * (static_cast<double>(n) * std::log(2.0 * 3.14159265358979323846) + logdet);
    return set;
}

}  // namespace illposed
