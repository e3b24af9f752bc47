#include "optdes/lp.hpp"

#include <stdexcept>
#include <vector>

namespace optdes {

namespace {

constexpr double kTol = 1e-9;

// Dense simplex tableau. Column layout: structural vars, slacks, artificials,
// then the RHS. Bland's rule on both the entering and leaving choices.
class Tableau {
 public:
  Tableau(const Vector& c, const Matrix& a_ub, const Vector& b_ub,
          const Matrix& a_eq, const Vector& b_eq)
      : n_(static_cast<int>(c.size())),
        r_(static_cast<int>(a_ub.rows())),
        s_(static_cast<int>(a_eq.rows())) {
    const int rows = r_ + s_;
    n_slack_ = r_;
    n_art_ = 0;
    // Artificials are needed for equality rows and for inequality rows whose
    // RHS is negative after adding the slack.
    std::vector<bool> needs_art(rows, false);
    for (int i = 0; i < r_; ++i) needs_art[i] = b_ub(i) < 0.0;
    for (int i = 0; i < s_; ++i) needs_art[r_ + i] = true;
    for (int i = 0; i < rows; ++i) n_art_ += needs_art[i] ? 1 : 0;

    cols_ = n_ + n_slack_ + n_art_;
    t_ = Matrix::Zero(rows, cols_ + 1);
    basis_.assign(rows, -1);

    int art = 0;
    for (int i = 0; i < rows; ++i) {
      const bool ub_row = i < r_;
      Vector row = ub_row ? Vector(a_ub.row(i)) : Vector(a_eq.row(i - r_));
      double rhs = ub_row ? b_ub(i) : b_eq(i - r_);
      double sign = 1.0;
      if (rhs < 0.0) {
        row = -row;
        rhs = -rhs;
        sign = -1.0;
      }
      t_.block(i, 0, 1, n_) = row.transpose();
      if (ub_row) t_(i, n_ + i) = sign;  // slack (surplus if the row flipped)
      if (needs_art[i]) {
        const int col = n_ + n_slack_ + art++;
        t_(i, col) = 1.0;
        basis_[i] = col;
      } else {
        basis_[i] = n_ + i;
      }
      t_(i, cols_) = rhs;
    }
    art_begin_ = n_ + n_slack_;
  }

  // Minimizes the sum of artificials; returns the attained value.
  double phase_one() {
    Vector obj = Vector::Zero(cols_);
    obj.segment(art_begin_, n_art_).setConstant(-1.0);  // maximize -sum(art)
    run(obj, /*restrict_to=*/cols_);
    double infeas = 0.0;
    for (int i = 0; i < rows(); ++i) {
      if (basis_[i] >= art_begin_) infeas += t_(i, cols_);
    }
    return infeas;
  }

  // Pivots any artificial still basic (at zero level) out of the basis, then
  // maximizes the real objective over the non-artificial columns.
  LpResult phase_two(const Vector& c) {
    for (int i = 0; i < rows(); ++i) {
      if (basis_[i] < art_begin_) continue;
      int col = -1;
      for (int j = 0; j < art_begin_; ++j) {
        if (std::abs(t_(i, j)) > kTol) {
          col = j;
          break;
        }
      }
      if (col >= 0) pivot(i, col);
      // A row with no eligible pivot is redundant; its artificial stays basic
      // at level zero and the column block below keeps it out of pricing.
    }
    Vector obj = Vector::Zero(cols_);
    obj.head(n_) = c;
    const bool bounded = run(obj, /*restrict_to=*/art_begin_);
    LpResult res;
    if (!bounded) {
      res.status = LpStatus::unbounded;
      return res;
    }
    res.status = LpStatus::optimal;
    res.x = Vector::Zero(n_);
    for (int i = 0; i < rows(); ++i) {
      if (basis_[i] < n_) res.x(basis_[i]) = t_(i, cols_);
    }
    res.value = c.dot(res.x);
    return res;
  }

 private:
  int rows() const { return static_cast<int>(t_.rows()); }

  void pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int i = 0; i < rows(); ++i) {
      if (i == row) continue;
      const double factor = t_(i, col);
      if (factor != 0.0) t_.row(i) -= factor * t_.row(row);
    }
    basis_[row] = col;
  }

  // Simplex iterations maximizing obj over columns [0, restrict_to).
  // Returns false if unbounded.
  bool run(const Vector& obj, int restrict_to) {
    for (long iter = 0;; ++iter) {
      if (iter > 100000) {
        throw std::runtime_error("solve_lp: iteration limit exceeded");
      }
      // Reduced costs: obj_j - obj_B . B^{-1} A_j, computed from the tableau.
      Vector y = Vector::Zero(rows());
      for (int i = 0; i < rows(); ++i) y(i) = obj(basis_[i]);
      int enter = -1;
      for (int j = 0; j < restrict_to; ++j) {
        const double reduced = obj(j) - y.dot(t_.col(j));
        if (reduced > kTol) {  // Bland: lowest improving index
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < rows(); ++i) {
        const double a = t_(i, enter);
        if (a > kTol) {
          const double ratio = t_(i, cols_) / a;
          if (leave < 0 || ratio < best_ratio - kTol ||
              (ratio < best_ratio + kTol && basis_[i] < basis_[leave])) {
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  int n_, r_, s_, n_slack_, n_art_, cols_, art_begin_;
  Matrix t_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp(const Vector& c, const Matrix& a_ub, const Vector& b_ub,
                  const Matrix& a_eq, const Vector& b_eq) {
  if (a_ub.rows() != b_ub.size() || a_eq.rows() != b_eq.size()) {
    throw std::invalid_argument("solve_lp: constraint dimension mismatch");
  }
  if ((a_ub.rows() > 0 && a_ub.cols() != c.size()) ||
      (a_eq.rows() > 0 && a_eq.cols() != c.size())) {
    throw std::invalid_argument("solve_lp: column count mismatch");
  }
  Tableau tab(c, a_ub, b_ub, a_eq, b_eq);
  if (tab.phase_one() > 1e-7) {
    return LpResult{LpStatus::infeasible, Vector(), 0.0};
  }
  return tab.phase_two(c);
}

}  // namespace optdes
