// Small dense linear programming: two-phase simplex with Bland's rule.
#pragma once

#include "optdes/linalg.hpp"

namespace optdes {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vector x;
  double value = 0.0;
};

// Maximize c.x subject to a_ub x <= b_ub, a_eq x = b_eq, x >= 0.
// Either constraint block may be empty (0 rows).
LpResult solve_lp(const Vector& c, const Matrix& a_ub, const Vector& b_ub,
                  const Matrix& a_eq, const Vector& b_eq);

}  // namespace optdes
