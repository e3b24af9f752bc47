// The constraint set S: simplex weights with optional per-stratum caps and
// general linear inequality constraints, plus the classical allocations
// (water-filling, proportional) built on the same cap structure.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "optdes/linalg.hpp"

namespace optdes {

struct LinearConstraint {
  Vector coefficients;  // length m
  double bound = 0.0;   // coefficients . w <= bound
};

class FeasibleRegion {
 public:
  FeasibleRegion(int m, std::optional<Vector> caps,
                 std::vector<LinearConstraint> linear);

  static FeasibleRegion simplex(int m) { return FeasibleRegion(m, {}, {}); }
  static FeasibleRegion with_caps(Vector caps);

  int size() const { return m_; }
  const std::optional<Vector>& caps() const { return caps_; }
  const std::vector<LinearConstraint>& linear_constraints() const {
    return linear_;
  }
  bool caps_only() const { return linear_.empty(); }

  bool contains(const Vector& w, double tol = 1e-9) const;

  // Exact interval [r1, r2] of z keeping the lift of coordinate i inside S.
  // Requires w in S and w_i < 1; the interval always contains w_i.
  std::pair<double, double> lift_interval(const Vector& w, int i) const;

  // argmax over S of a.w. Caps-only regions use the analytic ranks
  // construction (fill coordinates by decreasing a_i, ties by lowest index);
  // general regions go through the dense simplex solver.
  Vector maximize_linear(const Vector& a) const;

  // A deterministic, maximally interior starting allocation: water-filling for
  // caps-only regions, otherwise the max-min-coordinate LP point.
  Vector interior_start() const;

 private:
  int m_;
  std::optional<Vector> caps_;
  std::vector<LinearConstraint> linear_;
};

// Constrained uniform allocation: the weights maximizing prod w_i under
// w_i <= caps_i. Requires each cap in (0,1] and sum(caps) >= 1.
Vector water_filling(const Vector& caps);

// w_i = counts_i / sum(counts).
Vector proportional_allocation(const std::vector<long>& counts);

}  // namespace optdes
