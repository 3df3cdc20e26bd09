#pragma once

#include "robustmean/types.hpp"

namespace robustmean {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vector x;
  double objective = 0.0;
  int pivots = 0;
};

struct LpOptions {
  double tol = 1e-10;
  /// Consecutive degenerate pivots after which the entering rule switches
  /// from Dantzig to Bland's rule, which cannot cycle.
  int bland_after = 50;
  int max_pivots = 100000;
};

/// minimize c^T x  subject to  A x = b, x >= 0.
/// Dense two-phase tableau simplex; redundant equality rows are dropped after
/// phase one. Throws Errc::internal when max_pivots is exceeded.
LpResult solve_standard_lp(const Matrix& a, const Vector& b, const Vector& c, const LpOptions& opts = {});

}  // namespace robustmean
