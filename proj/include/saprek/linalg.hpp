#pragma once

#include "saprek/dense.hpp"

namespace saprek {

/// Thin, rank-truncated SVD: A = U * diag(sigma) * V^T with U (m x r),
/// V (n x r) column-orthonormal and sigma sorted non-increasing.
/// Singular values sigma_i <= max(m,n) * eps * sigma_max are truncated.
struct SvdResult {
    Mat u;
    Vec sigma;
    Mat v;
    int rank = 0;
};

SvdResult svd(const Mat& a);

/// Smallest positive singular value (after rank truncation).
double sigma_min_positive(const Mat& a);
double sigma_min_positive(const SvdResult& f);

/// Min-norm least-squares solution x* = A^+ b.
Vec pseudo_solve(const Mat& a, const Vec& b);
Vec pseudo_solve(const SvdResult& f, const Vec& b);

/// Projection of b onto ker(A^T), i.e. (I - A A^+) b.
Vec project_null_transpose(const Mat& a, const Vec& b);
Vec project_null_transpose(const SvdResult& f, const Vec& b);

/// Moore-Penrose pseudoinverse via SVD with the standard truncation rule.
Mat pseudo_inverse(const Mat& a);

/// Eigenvalues of a symmetric matrix, ascending (cyclic Jacobi, values only).
Vec symmetric_eigenvalues(Mat a);

/// Smallest eigenvalue strictly above rel_threshold * max eigenvalue.
/// Throws ZeroMatrix when no eigenvalue clears the threshold.
double lambda_min_positive(const Vec& eigenvalues, double rel_threshold = 1e-10);
double lambda_min_positive(const Mat& symmetric, double rel_threshold = 1e-10);

/// Solve S x = b for symmetric positive definite S (Cholesky).
Vec cholesky_solve(const Mat& s, const Vec& b);

} // namespace saprek
