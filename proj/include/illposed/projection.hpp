#pragma once

#include <functional>

#include "illposed/linalg.hpp"

namespace illposed {

// Finite-dimensional subspace with an explicit orthonormal basis.
class Subspace {
public:
    // Orthonormalizes the given columns (modified Gram-Schmidt with
    // reorthogonalization); throws if they are linearly dependent.
    explicit Subspace(const Matrix& columns);

    const Matrix& basis() const { return basis_; }
    std::size_t dim() const { return basis_.cols(); }
    std::size_t ambient_dim() const { return basis_.rows(); }

    Vector project(const Vector& x) const;      // P x = B B^T x
    Vector coordinates(const Vector& x) const;  // B^T x

    // Span of the first k columns of m (e.g. singular vectors).
    static Subspace from_columns(const Matrix& m, std::size_t k);

private:
    Matrix basis_;
};

struct LsqProjectionResult {
    Vector x;
    // Boundedness proxy ||(A_n^+)^T x_n||: the least-squares projection can
    // degenerate for unlucky subspaces, and this sequence growing without
    // bound along refinements is the signature.
    double boundedness_proxy = 0.0;
};

// Least-squares projection: minimum-norm solution of min ||A P_n x - y||
// restricted to X_n.
LsqProjectionResult lsq_projection(const Matrix& a, const Vector& y, const Subspace& xn);

// Dual least-squares projection: minimum-norm solution of Q_n A x = Q_n y
// with Q_n the projection onto Y_n. Y_n must lie in range(A) numerically.
Vector dual_lsq_projection(const Matrix& a, const Vector& y, const Subspace& yn);

// mu_n: the smallest singular value of Q_n A.
double smallest_projected_singular(const Matrix& a, const Subspace& yn);

struct DimensionChoice {
    std::size_t n = 0;
    bool capped = false;          // cap reached before the inequality failed
    bool no_reliable_mode = false;  // delta >= mu_1
};

// Largest n <= cap with delta <= mu_n for a nonincreasing sequence mu.
DimensionChoice apriori_dimension(double delta,
                                  const std::function<double(std::size_t)>& mu_of_n,
                                  std::size_t cap);

}  // namespace illposed
