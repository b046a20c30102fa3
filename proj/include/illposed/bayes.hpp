#pragma once

#include "illposed/linalg.hpp"

namespace illposed {

struct GaussianPosterior {
    Vector mean;         // = x_MAP
    Matrix covariance;   // delta^2 (T^T T + (delta^2/sigma^2) I)^-1
    double delta = 0.0;
    double sigma_prior = 0.0;
};

// (T^T T + (delta^2/sigma^2) I)^-1 T^T y
Vector map_estimate(const Matrix& t, const Vector& y_delta, double delta,
                    double sigma_prior);

GaussianPosterior posterior(const Matrix& t, const Vector& y_delta, double delta,
                            double sigma_prior);

// Draws from N(mean, covariance) via the symmetric square root of the
// covariance (SVD factorization).
class PosteriorSampler {
public:
    explicit PosteriorSampler(const GaussianPosterior& post);
    Vector sample(RandomSource& src) const;

private:
    Vector mean_;
    Matrix sqrt_cov_;
};

struct CmResult {
    Vector estimate;
    double effective_sample_size = 0.0;  // sum w / max w
    double weight_sum = 0.0;
};

// Importance-weighted prior-sample average with weights
// exp(-||T x_i - y||^2 / (2 delta^2)); throws on total weight underflow.
CmResult cm_monte_carlo(const Matrix& t, const Vector& y_delta, double delta,
                        double sigma_prior, std::size_t n_samples, RandomSource& src);

struct HpdSet {
    double eta_threshold = 0.0;       // -log density level
    double mahalanobis_radius = 0.0;  // sqrt of the chi-square quantile
};

// HPD credible ellipsoid of mass 1 - alpha for a Gaussian posterior.
HpdSet hpd_credible_set(const GaussianPosterior& post, double alpha);

// Regularized lower incomplete gamma P(s, x), series/continued-fraction split.
double regularized_gamma_p(double s, double x);

// Chi-square quantile: r2 with P(N/2, r2/2) = p, found by bisection.
double chi_square_quantile(std::size_t dof, double p);

}  // namespace illposed
