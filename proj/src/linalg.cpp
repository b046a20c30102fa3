#include "illposed/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace illposed {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vector operator*(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: shape mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Vector mul_transposed(const Matrix& a, const Vector& x) {
    if (a.rows() != x.size()) throw std::invalid_argument("matvec^T: shape mismatch");
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * xi;
    }
    return y;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

Vector operator+(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector sum: size mismatch");
    Vector c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

Vector operator-(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector diff: size mismatch");
    Vector c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
    return c;
}

Vector operator*(double s, const Vector& a) {
    Vector c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = s * a[i];
    return c;
}

void axpy(double s, const Vector& x, Vector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

Vector SingularSystem::u_col(std::size_t n) const {
    Vector u(U.rows());
    for (std::size_t i = 0; i < U.rows(); ++i) u[i] = U(i, n);
    return u;
}

Vector SingularSystem::v_col(std::size_t n) const {
    Vector v(V.rows());
    for (std::size_t i = 0; i < V.rows(); ++i) v[i] = V(i, n);
    return v;
}

namespace {

// One-sided Jacobi on columns of A (m x n, m >= n): rotate column pairs until
// all are mutually orthogonal, then sigma_j = ||a_j||.
struct JacobiResult {
    std::vector<Vector> cols;   // rotated columns of A (length m each)
    std::vector<Vector> vcols;  // accumulated right singular vectors (length n)
};

JacobiResult one_sided_jacobi(const Matrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    JacobiResult r;
    r.cols.resize(n, Vector(m));
    r.vcols.resize(n, Vector(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) r.cols[j][i] = a(i, j);
        r.vcols[j][j] = 1.0;
    }

    const double tol = 1e-15;
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                Vector& ap = r.cols[p];
                Vector& aq = r.cols[q];
                const double alpha = dot(ap, ap);
                const double beta = dot(aq, aq);
                const double gamma = dot(ap, aq);
                if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0)
                                     ? 1.0 / (zeta + std::sqrt(1.0 + zeta * zeta))
                                     : -1.0 / (-zeta + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double vp = ap[i], vq = aq[i];
                    ap[i] = c * vp - s * vq;
                    aq[i] = s * vp + c * vq;
                }
                Vector& wp = r.vcols[p];
                Vector& wq = r.vcols[q];
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = wp[i], vq = wq[i];
                    wp[i] = c * vp - s * vq;
                    wq[i] = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }
    return r;
}

}  // namespace

SingularSystem svd(const Matrix& a) {
    if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("svd: empty matrix");
    if (!a.all_finite()) throw std::invalid_argument("svd: non-finite entries");

    const bool transpose = a.rows() < a.cols();
    const Matrix work = transpose ? a.transposed() : a;
    const std::size_t m = work.rows(), n = work.cols();

    JacobiResult jr = one_sided_jacobi(work);

    std::vector<double> sig(n);
    for (std::size_t j = 0; j < n; ++j) sig[j] = norm2(jr.cols[j]);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return sig[i] > sig[j]; });

    const double sigma1 = sig[order[0]];
    const double cutoff =
        static_cast<double>(std::max(a.rows(), a.cols())) *
        std::numeric_limits<double>::epsilon() * sigma1;

    std::size_t rank = 0;
    for (std::size_t j = 0; j < n; ++j)
        if (sig[order[j]] > cutoff) ++rank;
    if (rank == 0) throw std::runtime_error("svd: matrix is numerically zero");

    SingularSystem sys;
    sys.rank = rank;
    sys.sigma.resize(rank);
    sys.U = Matrix(m, rank);
    sys.V = Matrix(n, rank);
    for (std::size_t k = 0; k < rank; ++k) {
        const std::size_t j = order[k];
        sys.sigma[k] = sig[j];
        for (std::size_t i = 0; i < m; ++i) sys.U(i, k) = jr.cols[j][i] / sig[j];
        for (std::size_t i = 0; i < n; ++i) sys.V(i, k) = jr.vcols[j][i];
    }
    if (transpose) std::swap(sys.U, sys.V);
    return sys;
}

Matrix cholesky(const Matrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("cholesky: not square");
    double amax = 0.0;
    for (double v : a.data()) amax = std::max(amax, std::abs(v));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(a(i, j) - a(j, i)) > 1e-12 * std::max(1.0, amax))
                throw std::invalid_argument("cholesky: matrix not symmetric");

    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("cholesky: non-positive pivot, matrix not positive definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

Vector solve_spd(const Matrix& a, const Vector& b) {
    if (a.rows() != b.size()) throw std::invalid_argument("solve_spd: shape mismatch");
    const Matrix l = cholesky(a);
    const std::size_t n = a.rows();
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    state_ = splitmix64(s);
    if (state_ == 0) state_ = splitmix64(s);
}

std::uint64_t RandomSource::next_u64() {
    // xorshift64*
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dULL;
}

double RandomSource::uniform01() {
    // top 53 bits -> (0,1)
    const std::uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 0.5) * (1.0 / 9007199254740992.0);
}

double RandomSource::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

Vector gaussian_vector(RandomSource& src, std::size_t n) {
    if (n < 1) throw std::invalid_argument("gaussian_vector: n must be >= 1");
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = src.gaussian();
    return v;
}

}  // namespace illposed
