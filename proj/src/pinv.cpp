#include "illposed/pinv.hpp"

#include <algorithm>
#include <cmath>

namespace illposed {

Vector pseudoinverse_apply(const SingularSystem& sys, const Vector& y) {
    Vector x(sys.V.rows(), 0.0);
    for (std::size_t n = 0; n < sys.rank; ++n) {
        double c = 0.0;
        for (std::size_t i = 0; i < sys.U.rows(); ++i) c += sys.U(i, n) * y[i];
        c /= sys.sigma[n];
        for (std::size_t i = 0; i < sys.V.rows(); ++i) x[i] += c * sys.V(i, n);
    }
    return x;
}

Vector min_norm_solution(const Matrix& a, const Vector& y) {
    return pseudoinverse_apply(svd(a), y);
}

PicardReport picard_diagnostic(const SingularSystem& sys, const Vector& y) {
    PicardReport rep;
    rep.partial_sums.resize(sys.rank);
    rep.coefficients.resize(sys.rank);
    Vector increments(sys.rank);
    double s = 0.0;
    for (std::size_t n = 0; n < sys.rank; ++n) {
        double c = 0.0;
        for (std::size_t i = 0; i < sys.U.rows(); ++i) c += sys.U(i, n) * y[i];
        rep.coefficients[n] = std::abs(c);
        increments[n] = (c * c) / (sys.sigma[n] * sys.sigma[n]);
        s += increments[n];
        rep.partial_sums[n] = s;
    }

    if (s == 0.0) {
        rep.verdict = PicardVerdict::converging;
        return rep;
    }

    // Geometric mean of increments in an index quartile; zero increments are
    // skipped so an all-zero quartile counts as vanishing.
    auto geo_mean = [&](std::size_t lo, std::size_t hi) -> double {
        double logsum = 0.0;
        std::size_t cnt = 0;
        for (std::size_t n = lo; n < hi; ++n) {
            if (increments[n] > 0.0) {
                logsum += std::log(increments[n]);
                ++cnt;
            }
        }
        if (cnt == 0) return 0.0;
        return std::exp(logsum / static_cast<double>(cnt));
    };

    const std::size_t r = sys.rank;
    if (r < 8) {
        rep.verdict = PicardVerdict::inconclusive;
        return rep;
    }
    const double mid = geo_mean(r / 4, r / 2);
    const double last = geo_mean(3 * r / 4, r);
    if (mid == 0.0 && last == 0.0) {
        rep.verdict = PicardVerdict::converging;
    } else if (mid == 0.0) {
        rep.verdict = PicardVerdict::diverging;
    } else {
        const double ratio = last / mid;
        if (ratio > 10.0)
            rep.verdict = PicardVerdict::diverging;
        else if (ratio < 0.1)
            rep.verdict = PicardVerdict::converging;
        else
            rep.verdict = PicardVerdict::inconclusive;
    }
    return rep;
}

Vector operator_function(const SingularSystem& sys,
                         const std::function<double(double)>& phi,
                         const Vector& x, const Vector& null_part) {
    Vector out(x.size(), 0.0);
    for (std::size_t n = 0; n < sys.rank; ++n) {
        double c = 0.0;
        for (std::size_t i = 0; i < sys.V.rows(); ++i) c += sys.V(i, n) * x[i];
        c *= phi(sys.sigma[n] * sys.sigma[n]);
        for (std::size_t i = 0; i < sys.V.rows(); ++i) out[i] += c * sys.V(i, n);
    }
    const double phi0 = phi(0.0);
    if (phi0 != 0.0) axpy(phi0, null_part, out);
    return out;
}

Vector operator_power(const SingularSystem& sys, double r, const Vector& x) {
    const Vector zero(x.size(), 0.0);
    return operator_function(
        sys, [r](double t) { return t > 0.0 ? std::pow(t, r / 2.0) : (r == 0.0 ? 1.0 : 0.0); },
        x, zero);
}

InterpolationCheck interpolation_check(const SingularSystem& sys, const Vector& x,
                                       double r, double s) {
    if (!(r > s) || s < 0.0) throw std::invalid_argument("interpolation_check: need r > s >= 0");
    InterpolationCheck c{};
    c.lhs = norm2(operator_power(sys, s, x));
    const double hr = norm2(operator_power(sys, r, x));
    c.rhs = std::pow(hr, s / r) * std::pow(norm2(x), 1.0 - s / r);
    return c;
}

}  // namespace illposed
