#include "mhl/bisection.hpp"

#include <cmath>
#include <stdexcept>

namespace mhl {

double infimum_satisfying(const std::function<bool(double)>& ok, double guess,
                          const BisectionOptions& opts) {
  if (!(guess > 0.0) || !std::isfinite(guess)) guess = 1.0;
  double lo = guess, hi = guess;
  if (ok(guess)) {
    // Shrink until the predicate fails.
    for (;;) {
      lo = hi / 2.0;
      if (lo < 1e-300) return 0.0;
      if (!ok(lo)) break;
      hi = lo;
    }
  } else {
    for (;;) {
      lo = hi;
      hi = lo * 2.0;
      if (!std::isfinite(hi)) throw std::runtime_error("bisection: no feasible upper bracket");
      if (ok(hi)) break;
    }
  }
  for (int it = 0; it < opts.max_iter && hi - lo > opts.rel_tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace mhl
