#pragma once
// Independent reference computations used as test oracles. They work from
// point values and partitions directly and avoid the library's cell indexes.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "mhl/filtration.hpp"

namespace oracle {

inline std::vector<std::size_t> cell_containing(const mhl::Filtration& F, int n, std::size_t pt) {
  for (const auto& cell : F.partition(n))
    if (std::find(cell.begin(), cell.end(), pt) != cell.end()) return cell;
  return {};
}

inline std::vector<double> cond_exp(const mhl::Filtration& F, const std::vector<double>& f, int n) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double num = 0.0, den = 0.0;
    for (std::size_t j : cell_containing(F, n, i)) {
      num += f[j] * F.space().prob(j);
      den += F.space().prob(j);
    }
    out[i] = num / den;
  }
  return out;
}

/// Level-N M, S, s from the value matrix.
struct Ops {
  std::vector<double> M, S, s;
};

inline Ops operators(const mhl::Filtration& F, const std::vector<std::vector<double>>& v) {
  const std::size_t n = v[0].size();
  Ops o{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (int k = 1; k < static_cast<int>(v.size()); ++k) {
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = (v[k][i] - v[k - 1][i]) * (v[k][i] - v[k - 1][i]);
      o.M[i] = std::max(o.M[i], std::abs(v[k][i]));
      o.S[i] += d2[i];
    }
    const auto c = cond_exp(F, d2, k - 1);
    for (std::size_t i = 0; i < n; ++i) o.s[i] += c[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    o.S[i] = std::sqrt(o.S[i]);
    o.s[i] = std::sqrt(o.s[i]);
  }
  return o;
}

/// Closed form of the weak L_p quasi-norm: sup_α α P(|f| > α)^{1/p}, attained
/// as α increases to each distinct value v of |f|.
inline double weak_lp(const std::vector<double>& probs, const std::vector<double>& f, double p) {
  std::set<double> values;
  for (double x : f)
    if (x != 0.0) values.insert(std::abs(x));
  double best = 0.0;
  for (double v : values) {
    double mass = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (std::abs(f[i]) >= v) mass += probs[i];
    best = std::max(best, v * std::pow(mass, 1.0 / p));
  }
  return best;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace oracle
