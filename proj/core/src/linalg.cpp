#include "optdes/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace optdes {

double determinant(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("determinant: matrix must be square");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("determinant: entries must be finite");
  }
  const auto p = m.rows();
  if (p == 1) return m(0, 0);
  if (p == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return m.partialPivLu().determinant();
}

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

double log_det_psd(const Matrix& m) {
  if (!is_symmetric(m)) {
    throw std::invalid_argument("log_det_psd: matrix is not symmetric");
  }
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    return -std::numeric_limits<double>::infinity();
  }
  const Vector diag = llt.matrixLLT().diagonal();
  if ((diag.array() <= 0.0).any()) {
    return -std::numeric_limits<double>::infinity();
  }
  return 2.0 * diag.array().log().sum();
}

Vector solve_linear(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw std::invalid_argument("solve_linear: dimension mismatch");
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot > 1e-12)) {
    throw std::runtime_error("solve_linear: matrix is numerically singular");
  }
  return lu.solve(b);
}

int symmetric_rank(const Matrix& m, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues().cwiseAbs();
  const double cutoff = rel_tol * std::max(ev.maxCoeff(), 1e-300);
  return static_cast<int>((ev.array() > cutoff).count());
}

double min_eigenvalue_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace optdes
