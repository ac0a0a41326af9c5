#pragma once

#include <limits>
#include <vector>

#include "mhl/filtration.hpp"
#include "mhl/musielak.hpp"

namespace mhl {

enum class WeightCondition { Aq, S, SMinus, SPlus };

const char* to_string(WeightCondition condition);

struct WeightReport {
  WeightCondition condition = WeightCondition::Aq;
  double q = std::numeric_limits<double>::quiet_NaN();
  /// Best constant K over levels, points and the t-grid.
  double constant = 1.0;
  std::vector<double> t_grid;
  /// Separable φ: t cancels and the single t = 1 is exact.
  bool t_free = false;
  bool pass = false;
  // Where the constant is attained.
  int level = 0;
  std::size_t point = 0;
  double t = std::numeric_limits<double>::quiet_NaN();
};

/// Uniform A_q constant: max of E_n(φ)[E_n(φ^{-1/(q-1)})]^{q-1} (q > 1) or
/// E_n(φ)/φ (q = 1) over n = 0..N, points and t. Throws for q < 1.
WeightReport check_aq(const Filtration& filtration, const MOFunction& phi, double q,
                      const LogGrid& grid = {});

/// Least K >= 1 with K^{-1} φ_{n-1} <= φ_n <= K φ_{n-1} (S), only the left
/// inequality (S⁻) or only the right one (S⁺), where φ_n(·,t) = E_n φ(·,t).
WeightReport check_s_condition(const Filtration& filtration, const MOFunction& phi,
                               WeightCondition variant, const LogGrid& grid = {});

}  // namespace mhl
