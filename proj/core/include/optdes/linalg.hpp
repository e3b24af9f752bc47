// Dense small-matrix numerics shared across the library.
#pragma once

#include <Eigen/Dense>

namespace optdes {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// det(M) by partial-pivot LU (closed forms for small orders). Singular input
// yields 0, never throws.
double determinant(const Matrix& m);

bool is_symmetric(const Matrix& m, double tol = 1e-8);

// log det of a symmetric PSD matrix via Cholesky. Returns -infinity when the
// factorization fails (singular); rejects non-symmetric input.
double log_det_psd(const Matrix& m);

// Solve A x = b; requires pivot magnitudes > 1e-12.
Vector solve_linear(const Matrix& a, const Vector& b);

// Rank of a symmetric matrix, counting eigenvalues above rel_tol * max|eig|.
int symmetric_rank(const Matrix& m, double rel_tol = 1e-9);

// Smallest eigenvalue of a symmetric matrix (PSD checks in validation code).
double min_eigenvalue_sym(const Matrix& m);

}  // namespace optdes
