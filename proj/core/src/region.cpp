#include "optdes/region.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "optdes/lp.hpp"

namespace optdes {

FeasibleRegion::FeasibleRegion(int m, std::optional<Vector> caps,
                               std::vector<LinearConstraint> linear)
    : m_(m), caps_(std::move(caps)), linear_(std::move(linear)) {
  if (m_ < 1) throw std::invalid_argument("FeasibleRegion: need m >= 1");
  if (caps_) {
    if (caps_->size() != m_) {
      throw std::invalid_argument("FeasibleRegion: caps length mismatch");
    }
    for (int i = 0; i < m_; ++i) {
      const double c = (*caps_)(i);
      if (!(c > 0.0) || c > 1.0) {
        throw std::invalid_argument("FeasibleRegion: caps must lie in (0,1]");
      }
    }
    if (caps_->sum() < 1.0 - 1e-12) {
      throw std::invalid_argument(
          "FeasibleRegion: caps sum below 1, region is empty");
    }
  }
  for (const auto& lc : linear_) {
    if (lc.coefficients.size() != m_) {
      throw std::invalid_argument(
          "FeasibleRegion: constraint coefficient length mismatch");
    }
  }
}

FeasibleRegion FeasibleRegion::with_caps(Vector caps) {
  const int m = static_cast<int>(caps.size());
  return FeasibleRegion(m, std::move(caps), {});
}

bool FeasibleRegion::contains(const Vector& w, double tol) const {
  if (w.size() != m_) {
    throw std::invalid_argument("contains: allocation length mismatch");
  }
  if (w.minCoeff() < -tol) return false;
  if (std::abs(w.sum() - 1.0) > tol) return false;
  if (caps_ && ((w - *caps_).maxCoeff() > tol)) return false;
  for (const auto& lc : linear_) {
    const double scale = 1.0 + std::abs(lc.bound);
    if (lc.coefficients.dot(w) > lc.bound + tol * scale) return false;
  }
  return true;
}

std::pair<double, double> FeasibleRegion::lift_interval(const Vector& w,
                                                        int i) const {
  if (i < 0 || i >= m_) throw std::invalid_argument("lift_interval: bad index");
  if (!contains(w, 1e-9)) {
    throw std::invalid_argument("lift_interval: allocation outside the region");
  }
  if (!(w(i) < 1.0)) {
    throw std::invalid_argument("lift_interval: w_i must be < 1");
  }
  double r1 = 0.0, r2 = 1.0;
  const double rest = 1.0 - w(i);
  if (caps_) {
    r2 = std::min(r2, (*caps_)(i));
    for (int j = 0; j < m_; ++j) {
      if (j != i && w(j) > 0.0) {
        r1 = std::max(r1, 1.0 - (*caps_)(j)*rest / w(j));
      }
    }
  }
  for (const auto& lc : linear_) {
    // Along the lift, the constraint value is linear in z:
    //   g_i z + (1-z) * (g.w - g_i w_i) / (1-w_i) <= bound
    const double t = (lc.coefficients.dot(w) - lc.coefficients(i) * w(i)) / rest;
    const double den = lc.coefficients(i) - t;
    const double num = lc.bound - t;
    if (den > 1e-14) {
      r2 = std::min(r2, num / den);
    } else if (den < -1e-14) {
      r1 = std::max(r1, num / den);
    }
  }
  r1 = std::max(r1, 0.0);
  r2 = std::min(r2, 1.0);
  if (r1 > r2) {
    // Only roundoff can produce an empty intersection here; collapse onto the
    // feasible current coordinate.
    const double z = std::clamp(w(i), std::min(r1, r2), std::max(r1, r2));
    r1 = r2 = z;
  }
  return {r1, r2};
}

Vector FeasibleRegion::maximize_linear(const Vector& a) const {
  if (a.size() != m_) {
    throw std::invalid_argument("maximize_linear: coefficient length mismatch");
  }
  if (caps_only() && caps_) {
    const Vector& c = *caps_;
    if (std::abs(c.sum() - 1.0) <= 1e-12) return c;  // singleton region
    std::vector<int> order(m_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int u, int v) { return a(u) > a(v); });
    Vector w = Vector::Zero(m_);
    double left = 1.0;
    for (int idx : order) {
      const double take = std::min(c(idx), left);
      w(idx) = take;
      left -= take;
      if (left <= 0.0) break;
    }
    return w;
  }
  if (caps_only()) {  // plain simplex: put all mass on the best coordinate
    int best = 0;
    for (int i = 1; i < m_; ++i) {
      if (a(i) > a(best)) best = i;
    }
    Vector w = Vector::Zero(m_);
    w(best) = 1.0;
    return w;
  }
  const int rows_ub = (caps_ ? m_ : 0) + static_cast<int>(linear_.size());
  Matrix a_ub(rows_ub, m_);
  Vector b_ub(rows_ub);
  int r = 0;
  if (caps_) {
    for (int i = 0; i < m_; ++i, ++r) {
      a_ub.row(r).setZero();
      a_ub(r, i) = 1.0;
      b_ub(r) = (*caps_)(i);
    }
  }
  for (const auto& lc : linear_) {
    a_ub.row(r) = lc.coefficients.transpose();
    b_ub(r) = lc.bound;
    ++r;
  }
  Matrix a_eq = Matrix::Ones(1, m_);
  Vector b_eq = Vector::Ones(1);
  const LpResult res = solve_lp(a, a_ub, b_ub, a_eq, b_eq);
  if (res.status == LpStatus::infeasible) {
    throw std::runtime_error("maximize_linear: region is infeasible");
  }
  if (res.status == LpStatus::unbounded) {
    throw std::runtime_error("maximize_linear: unexpected unbounded program");
  }
  return res.x;
}

Vector FeasibleRegion::interior_start() const {
  if (caps_only()) {
    if (!caps_) return Vector::Constant(m_, 1.0 / m_);
    return water_filling(*caps_);
  }
  // Maximize t subject to w in S and w_i >= t: variables (w, t).
  const int rows_ub = m_ + (caps_ ? m_ : 0) + static_cast<int>(linear_.size());
  Matrix a_ub = Matrix::Zero(rows_ub, m_ + 1);
  Vector b_ub = Vector::Zero(rows_ub);
  int r = 0;
  for (int i = 0; i < m_; ++i, ++r) {  // t - w_i <= 0
    a_ub(r, i) = -1.0;
    a_ub(r, m_) = 1.0;
  }
  if (caps_) {
    for (int i = 0; i < m_; ++i, ++r) {
      a_ub(r, i) = 1.0;
      b_ub(r) = (*caps_)(i);
    }
  }
  for (const auto& lc : linear_) {
    a_ub.block(r, 0, 1, m_) = lc.coefficients.transpose();
    b_ub(r) = lc.bound;
    ++r;
  }
  Matrix a_eq = Matrix::Zero(1, m_ + 1);
  a_eq.block(0, 0, 1, m_).setOnes();
  Vector b_eq = Vector::Ones(1);
  Vector obj = Vector::Zero(m_ + 1);
  obj(m_) = 1.0;
  const LpResult res = solve_lp(obj, a_ub, b_ub, a_eq, b_eq);
  if (res.status != LpStatus::optimal) {
    throw std::runtime_error("interior_start: region is infeasible");
  }
  return res.x.head(m_);
}

Vector water_filling(const Vector& caps) {
  const int m = static_cast<int>(caps.size());
  for (int i = 0; i < m; ++i) {
    if (!(caps(i) > 0.0) || caps(i) > 1.0) {
      throw std::invalid_argument("water_filling: caps must lie in (0,1]");
    }
  }
  const double total = caps.sum();
  if (total < 1.0 - 1e-12) {
    throw std::invalid_argument("water_filling: caps sum below 1, infeasible");
  }
  if (caps.minCoeff() >= 1.0 / m) return Vector::Constant(m, 1.0 / m);
  if (std::abs(total - 1.0) <= 1e-12) return caps;
  Vector sorted = caps;
  std::sort(sorted.data(), sorted.data() + m);
  // Find k and level u in [sorted_{k-1}, sorted_k) with
  // sum_{i<k} sorted_i + (m-k) u = 1.
  double below = 0.0;
  for (int k = 0; k < m; ++k) {
    const double u = (1.0 - below) / (m - k);
    const double lo = (k == 0) ? 0.0 : sorted(k - 1);
    if (u >= lo && u < sorted(k)) {
      return caps.cwiseMin(u);
    }
    below += sorted(k);
  }
  throw std::logic_error("water_filling: no level found");
}

Vector proportional_allocation(const std::vector<long>& counts) {
  if (counts.empty()) {
    throw std::invalid_argument("proportional_allocation: empty counts");
  }
  double total = 0.0;
  for (long c : counts) {
    if (c <= 0) {
      throw std::invalid_argument(
          "proportional_allocation: counts must be positive");
    }
    total += static_cast<double>(c);
  }
  Vector w(static_cast<int>(counts.size()));
  for (int i = 0; i < w.size(); ++i) {
    w(i) = static_cast<double>(counts[i]) / total;
  }
  return w;
}

}  // namespace optdes
