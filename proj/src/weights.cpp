#include "mhl/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace mhl {

const char* to_string(WeightCondition condition) {
  switch (condition) {
    case WeightCondition::Aq: return "A_q";
    case WeightCondition::S: return "S";
    case WeightCondition::SMinus: return "S-";
    case WeightCondition::SPlus: return "S+";
  }
  return "?";
}

namespace {

std::vector<double> effective_grid(const MOFunction& phi, const LogGrid& grid) {
  return phi.separable() ? std::vector<double>{1.0} : grid.values();
}

PointFunction sample(const Filtration& F, const MOFunction& phi, double t) {
  PointFunction v(F.num_points());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = phi(i, t);
    if (!(v[i] > 0.0) || !std::isfinite(v[i]))
      throw std::invalid_argument("weight checks need a strictly positive, finite phi");
  }
  return v;
}

/// Per-cell conditional means of v at level n.
std::vector<double> cell_means(const Filtration& F, const PointFunction& v, int n) {
  std::vector<double> out(F.cell_count(n), 0.0);
  for (std::size_t c = 0; c < out.size(); ++c) {
    for (std::size_t pt : F.partition(n)[c]) out[c] += v[pt] * F.space().prob(pt);
    out[c] /= F.cell_prob(n, c);
  }
  return out;
}

void record(WeightReport& r, double value, int n, std::size_t point, double t) {
  if (value > r.constant) {
    r.constant = value;
    r.level = n;
    r.point = point;
    r.t = t;
  }
}

}  // namespace

WeightReport check_aq(const Filtration& F, const MOFunction& phi, double q, const LogGrid& grid) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("A_q needs q in [1, inf)");
  phi.require_points(F.num_points());
  WeightReport r;
  r.condition = WeightCondition::Aq;
  r.q = q;
  r.t_free = phi.separable();
  r.t_grid = effective_grid(phi, grid);
  r.constant = 0.0;
  for (double t : r.t_grid) {
    const PointFunction w = sample(F, phi, t);
    PointFunction dual(w.size());
    if (q > 1.0)
      for (std::size_t i = 0; i < w.size(); ++i) dual[i] = std::pow(w[i], -1.0 / (q - 1.0));
    for (int n = 0; n <= F.horizon(); ++n) {
      const auto mean = cell_means(F, w, n);
      if (q > 1.0) {
        const auto dual_mean = cell_means(F, dual, n);
        for (std::size_t c = 0; c < mean.size(); ++c)
          record(r, mean[c] * std::pow(dual_mean[c], q - 1.0), n, F.partition(n)[c].front(), t);
      } else {
        for (std::size_t c = 0; c < mean.size(); ++c)
          for (std::size_t pt : F.partition(n)[c]) record(r, mean[c] / w[pt], n, pt, t);
      }
    }
  }
  r.pass = std::isfinite(r.constant);
  return r;
}

WeightReport check_s_condition(const Filtration& F, const MOFunction& phi,
                               WeightCondition variant, const LogGrid& grid) {
  if (variant == WeightCondition::Aq)
    throw std::invalid_argument("check_s_condition takes S, S- or S+");
  phi.require_points(F.num_points());
  WeightReport r;
  r.condition = variant;
  r.t_free = phi.separable();
  r.t_grid = effective_grid(phi, grid);
  r.constant = 1.0;
  for (double t : r.t_grid) {
    const PointFunction w = sample(F, phi, t);
    std::vector<double> prev = cell_means(F, w, 0);
    for (int n = 1; n <= F.horizon(); ++n) {
      const auto cur = cell_means(F, w, n);
      for (std::size_t c = 0; c < cur.size(); ++c) {
        const double ratio = cur[c] / prev[F.parent_of(n, c)];
        const std::size_t pt = F.partition(n)[c].front();
        if (variant != WeightCondition::SMinus) record(r, ratio, n, pt, t);
        if (variant != WeightCondition::SPlus) record(r, 1.0 / ratio, n, pt, t);
      }
      prev = cur;
    }
  }
  r.pass = std::isfinite(r.constant);
  return r;
}

}  // namespace mhl
