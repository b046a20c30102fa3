#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace illposed {

using Vector = std::vector<double>;

// Dense row-major matrix. Entries must stay finite; checked where it matters.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    static Matrix identity(std::size_t n);
    Matrix transposed() const;
    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& x);

// y <- A^T x without forming the transpose
Vector mul_transposed(const Matrix& a, const Vector& x);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& a);
void axpy(double s, const Vector& x, Vector& y);  // y += s*x
double frobenius_norm(const Matrix& a);

// Singular system of a discrete operator: A v_n = sigma_n u_n, A^T u_n = sigma_n v_n.
// Zero (numerically negligible) singular values are dropped; `rank` counts the rest.
struct SingularSystem {
    Vector sigma;  // descending, all > 0
    Matrix U;      // rows() x rank, columns u_n
    Matrix V;      // cols() x rank, columns v_n
    std::size_t rank = 0;

    Vector u_col(std::size_t n) const;
    Vector v_col(std::size_t n) const;
};

// One-sided Jacobi SVD. Drops sigma_n <= max(rows, cols) * eps * sigma_1.
SingularSystem svd(const Matrix& a);

// Cholesky solve for symmetric positive definite systems.
// Throws std::invalid_argument on asymmetry, std::runtime_error on a
// non-positive pivot.
Vector solve_spd(const Matrix& a, const Vector& b);

// Returns the Cholesky factor L with A = L L^T (lower triangular).
Matrix cholesky(const Matrix& a);

// Deterministic 64-bit generator: splitmix64 expansion of the seed feeding an
// xorshift64* state, Box-Muller for normals. Identical seeds give identical
// streams on every platform.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed);

    std::uint64_t next_u64();
    double uniform01();     // in (0,1)
    double gaussian();      // standard normal
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

Vector gaussian_vector(RandomSource& src, std::size_t n);

// splitmix64 mixing step, also used to derive per-realization seeds.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace illposed
