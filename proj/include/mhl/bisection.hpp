#pragma once

#include <functional>

namespace mhl {

struct BisectionOptions {
  double rel_tol = 1e-10;
  int max_iter = 200;
};

/// Smallest λ > 0 with ok(λ), for a predicate monotone in λ (false below the
/// threshold, true above). The bracket is grown by doubling/halving from
/// `guess`. Returns the upper end of the final bracket, so ok(result) holds.
/// Returns 0 when ok holds for every λ down to the underflow range.
double infimum_satisfying(const std::function<bool(double)>& ok, double guess,
                          const BisectionOptions& opts = {});

}  // namespace mhl
