#include "illposed/projection.hpp"

#include <cmath>

#include "illposed/pinv.hpp"

namespace illposed {

Subspace::Subspace(const Matrix& columns) {
    const std::size_t m = columns.rows(), k = columns.cols();
    if (k == 0 || m == 0) throw std::invalid_argument("Subspace: empty basis");
    std::vector<Vector> q;
    q.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        Vector v(m);
        for (std::size_t i = 0; i < m; ++i) v[i] = columns(i, j);
        const double initial = norm2(v);
        // two MGS passes
        for (int pass = 0; pass < 2; ++pass)
            for (const Vector& u : q) axpy(-dot(u, v), u, v);
        const double nrm = norm2(v);
        if (nrm <= 1e-12 * (initial + 1.0))
            throw std::invalid_argument("Subspace: columns are linearly dependent");
        for (double& x : v) x /= nrm;
        q.push_back(std::move(v));
    }
    basis_ = Matrix(m, k);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < m; ++i) basis_(i, j) = q[j][i];
}

Vector Subspace::coordinates(const Vector& x) const { return mul_transposed(basis_, x); }

Vector Subspace::project(const Vector& x) const { return basis_ * coordinates(x); }

Subspace Subspace::from_columns(const Matrix& m, std::size_t k) {
    if (k == 0 || k > m.cols()) throw std::invalid_argument("Subspace::from_columns: bad k");
    Matrix cols(m.rows(), k);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < k; ++j) cols(i, j) = m(i, j);
    return Subspace(cols);
}

LsqProjectionResult lsq_projection(const Matrix& a, const Vector& y, const Subspace& xn) {
    if (xn.ambient_dim() != a.cols())
        throw std::invalid_argument("lsq_projection: subspace dimension mismatch");
    const Matrix b = a * xn.basis();
    double bnorm = frobenius_norm(b);
    LsqProjectionResult res;
    if (bnorm == 0.0) {
        // A P_n = 0: only the zero solution has minimum norm
        res.x.assign(a.cols(), 0.0);
        return res;
    }
    const SingularSystem bs = svd(b);
    const Vector c = pseudoinverse_apply(bs, y);
    res.x = xn.basis() * c;
    // (A_n^+)^T x_n in basis coordinates: sum sigma_i^{-1} <v_i, c> u_i
    Vector w(b.rows(), 0.0);
    for (std::size_t i = 0; i < bs.rank; ++i) {
        double t = 0.0;
        for (std::size_t j = 0; j < bs.V.rows(); ++j) t += bs.V(j, i) * c[j];
        t /= bs.sigma[i];
        for (std::size_t j = 0; j < bs.U.rows(); ++j) w[j] += t * bs.U(j, i);
    }
    res.boundedness_proxy = norm2(w);
    return res;
}

Vector dual_lsq_projection(const Matrix& a, const Vector& y, const Subspace& yn) {
    if (yn.ambient_dim() != a.rows())
        throw std::invalid_argument("dual_lsq_projection: subspace dimension mismatch");
    // Y_n must lie in range(A): check the residual of projecting each basis
    // column onto span(U).
    const SingularSystem asys = svd(a);
    for (std::size_t j = 0; j < yn.dim(); ++j) {
        Vector b(yn.ambient_dim());
        for (std::size_t i = 0; i < yn.ambient_dim(); ++i) b[i] = yn.basis()(i, j);
        Vector proj(b.size(), 0.0);
        for (std::size_t k = 0; k < asys.rank; ++k) {
            double c = 0.0;
            for (std::size_t i = 0; i < b.size(); ++i) c += asys.U(i, k) * b[i];
            for (std::size_t i = 0; i < b.size(); ++i) proj[i] += c * asys.U(i, k);
        }
        if (norm2(b - proj) > 1e-8)
            throw std::runtime_error("dual_lsq_projection: subspace escapes range(A)");
    }
    // In Y_n coordinates the equation Q_n A x = Q_n y reads (B^T A) x = B^T y.
    const Matrix m = yn.basis().transposed() * a;
    return pseudoinverse_apply(svd(m), yn.coordinates(y));
}

double smallest_projected_singular(const Matrix& a, const Subspace& yn) {
    const Matrix m = yn.basis().transposed() * a;
    const SingularSystem s = svd(m);
    if (s.rank < yn.dim()) return 0.0;  // rank-deficient projection
    return s.sigma[s.rank - 1];
}

DimensionChoice apriori_dimension(double delta,
                                  const std::function<double(std::size_t)>& mu_of_n,
                                  std::size_t cap) {
    DimensionChoice out;
    if (delta > mu_of_n(1)) {
        out.no_reliable_mode = true;
        return out;
    }
    std::size_t n = 1;
    while (n < cap && delta <= mu_of_n(n + 1)) ++n;
    out.n = n;
    out.capped = (n == cap && delta <= mu_of_n(cap));
    return out;
}

}  // namespace illposed
