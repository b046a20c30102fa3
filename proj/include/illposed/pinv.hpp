#pragma once

#include <functional>
#include <string>

#include "illposed/linalg.hpp"

namespace illposed {

enum class PicardVerdict { converging, diverging, inconclusive };

struct PicardReport {
    Vector partial_sums;   // S_N = sum_{n<=N} sigma_n^{-2} <y,u_n>^2, nondecreasing
    Vector coefficients;   // |<y,u_n>|
    PicardVerdict verdict = PicardVerdict::inconclusive;
};

// x+ = sum sigma_n^{-1} <y,u_n> v_n over retained singular triples.
Vector pseudoinverse_apply(const SingularSystem& sys, const Vector& y);

// Minimum-norm least-squares solution via the SVD of A.
Vector min_norm_solution(const Matrix& a, const Vector& y);

// Partial sums of the Picard series with a heuristic convergence verdict:
// geometric-mean increment of the last quartile vs the middle quartile,
// ratio > 10 -> diverging, < 0.1 -> converging, else inconclusive.
PicardReport picard_diagnostic(const SingularSystem& sys, const Vector& y);

// phi(K*K) x = sum phi(sigma_n^2) <x,v_n> v_n + phi(0) * null_part.
// null_part is the caller-supplied projection of x onto the kernel (zero for
// injective discrete operators).
Vector operator_function(const SingularSystem& sys,
                         const std::function<double(double)>& phi,
                         const Vector& x, const Vector& null_part);

// |K|^r x, i.e. operator_function with phi(t) = t^(r/2) and zero null part
// for r > 0 (|K|^0 projects onto the orthogonal complement of the kernel).
Vector operator_power(const SingularSystem& sys, double r, const Vector& x);

struct InterpolationCheck {
    double lhs;  // || |K|^s x ||
    double rhs;  // || |K|^r x ||^(s/r) * ||x||^(1-s/r)
};

// Evaluates both sides of the interpolation inequality; requires r > s >= 0.
InterpolationCheck interpolation_check(const SingularSystem& sys, const Vector& x,
                                       double r, double s);

}  // namespace illposed
