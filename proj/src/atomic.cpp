#include "mhl/atomic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "mhl/weights.hpp"

namespace mhl {

const char* to_string(DecompositionKind kind) {
  switch (kind) {
    case DecompositionKind::s: return "s";
    case DecompositionKind::P: return "P";
    case DecompositionKind::Q: return "Q";
    case DecompositionKind::S: return "S";
    case DecompositionKind::M: return "M";
  }
  return "?";
}

OperatorKind atom_operator(DecompositionKind kind) {
  switch (kind) {
    case DecompositionKind::s: return OperatorKind::ConditionalSquare;
    case DecompositionKind::P:
    case DecompositionKind::M: return OperatorKind::Maximal;
    case DecompositionKind::Q:
    case DecompositionKind::S: return OperatorKind::Square;
  }
  return OperatorKind::ConditionalSquare;
}

HardySpace matching_space(DecompositionKind kind) {
  switch (kind) {
    case DecompositionKind::s: return HardySpace::WHs;
    case DecompositionKind::P: return HardySpace::WP;
    case DecompositionKind::Q: return HardySpace::WQ;
    case DecompositionKind::S: return HardySpace::WHS;
    case DecompositionKind::M: return HardySpace::WHM;
  }
  return HardySpace::WHs;
}

namespace {

struct Range {
  double min_positive = 0.0;
  double max = 0.0;
};

/// Extremes over every level of the controlling process. The lower end must
/// cover all levels, not just the terminal one: below the smallest positive
/// value the stopping time sits where f is still zero.
Range controller_range(const std::vector<PointFunction>& path) {
  Range r{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& level : path)
    for (double v : level) {
      if (v > 0.0) r.min_positive = std::min(r.min_positive, v);
      r.max = std::max(r.max, v);
    }
  return r;
}

Martingale scaled_difference(const Martingale& f, const StoppingTime& upper,
                             const StoppingTime& lower, double mu) {
  const Filtration& F = f.filtration();
  std::vector<PointFunction> values(F.horizon() + 1, PointFunction(F.num_points()));
  for (int n = 0; n <= F.horizon(); ++n)
    for (std::size_t i = 0; i < F.num_points(); ++i)
      values[n][i] =
          (f.at(std::min(upper.at(i), n), i) - f.at(std::min(lower.at(i), n), i)) / mu;
  return Martingale(AdaptedProcess(f.filtration_ptr(), values, 0.0), 1e-9);
}

Decomposition build(DecompositionKind kind, const MOFunction& phi, const Martingale& f,
                    double c_tilde, const Range& range,
                    const std::function<StoppingTime(int)>& stopping_at) {
  const Filtration& F = f.filtration();
  phi.require_points(F.num_points());
  Decomposition d;
  d.kind = kind;
  d.filtration = f.filtration_ptr();
  d.c_tilde = c_tilde;
  if (!(range.max > 0.0)) return d;

  d.k_min = static_cast<int>(std::floor(std::log2(range.min_positive))) - 1;
  d.k_max = static_cast<int>(std::ceil(std::log2(range.max)));
  std::map<int, StoppingTime> nu;
  for (int k = d.k_min; k <= d.k_max + 1; ++k) nu.emplace(k, stopping_at(k));

  for (int k = d.k_min; k <= d.k_max; ++k) {
    const StoppingTime& lower = nu.at(k);
    const double mu = c_tilde * std::ldexp(1.0, k) *
                      luxemburg_indicator_norm(phi, F.space(), lower.support());
    Martingale atom = mu > 0.0 ? scaled_difference(f, nu.at(k + 1), lower, mu)
                               : Martingale::zero(f.filtration_ptr());
    d.entries.push_back({k, mu, std::move(atom), lower});
  }
  return d;
}

}  // namespace

Decomposition decompose_s(const MOFunction& phi, const Martingale& f) {
  const auto path = operator_path(OperatorKind::ConditionalSquare, f);
  const FiltrationPtr& F = f.filtration_ptr();
  const int N = f.horizon();
  auto stopping_at = [&](int k) {
    const double level = std::ldexp(1.0, k);
    std::vector<int> tau(F->num_points(), N + 1);
    for (std::size_t i = 0; i < tau.size(); ++i)
      for (int n = 0; n < N; ++n)
        if (path[n + 1][i] > level) {
          tau[i] = n;
          break;
        }
    return StoppingTime(F, std::move(tau));
  };
  return build(DecompositionKind::s, phi, f, 2.0, controller_range(path), stopping_at);
}

Decomposition decompose_pq(EnvelopeKind kind, const MOFunction& phi, const Martingale& f) {
  const auto path = minimal_envelope(kind, f).values.point_matrix();
  const FiltrationPtr& F = f.filtration_ptr();
  const int N = f.horizon();
  auto stopping_at = [&](int k) {
    const double level = std::ldexp(1.0, k);
    std::vector<int> tau(F->num_points(), N + 1);
    for (std::size_t i = 0; i < tau.size(); ++i)
      for (int n = 0; n <= N; ++n)
        if (path[n][i] > level) {
          tau[i] = n;
          break;
        }
    return StoppingTime(F, std::move(tau));
  };
  return build(kind == EnvelopeKind::P ? DecompositionKind::P : DecompositionKind::Q, phi, f, 3.0,
               controller_range(path), stopping_at);
}

Decomposition decompose_sm(OperatorKind kind, const MOFunction& phi, const Martingale& f,
                           const LogGrid& grid) {
  if (kind == OperatorKind::ConditionalSquare)
    throw std::invalid_argument("decompose_sm takes the S or M operator");
  const Filtration& F = f.filtration();
  phi.require_points(F.num_points());
  double K = 0.0;
  try {
    K = check_s_condition(F, phi, WeightCondition::SMinus, grid).constant;
  } catch (const std::invalid_argument& e) {
    throw PreconditionError(std::string("phi is not in S-: ") + e.what());
  }
  if (!std::isfinite(K)) throw PreconditionError("phi has no finite S- constant");
  const double R = regularity_constant(F);
  if (!std::isfinite(R)) throw PreconditionError("filtration is not regular");

  const auto path = operator_path(kind, f);
  const AdaptedProcess gamma(f.filtration_ptr(), path, 1e-12);
  auto stopping_at = [&](int k) { return stopping_time_regular(gamma, std::ldexp(1.0, k)); };
  // |f^{ν^{k+1}} - f^{ν^k}| can reach 2^{k+1} + 2^k for M-atoms, hence C̃ = 3 there.
  const bool square = kind == OperatorKind::Square;
  Decomposition d = build(square ? DecompositionKind::S : DecompositionKind::M, phi, f,
                          square ? 2.0 : 3.0, controller_range(path), stopping_at);
  d.weight_constant = K;
  d.regularity = R;
  return d;
}

Decomposition decompose(DecompositionKind kind, const MOFunction& phi, const Martingale& f,
                        const LogGrid& grid) {
  switch (kind) {
    case DecompositionKind::s: return decompose_s(phi, f);
    case DecompositionKind::P: return decompose_pq(EnvelopeKind::P, phi, f);
    case DecompositionKind::Q: return decompose_pq(EnvelopeKind::Q, phi, f);
    case DecompositionKind::S: return decompose_sm(OperatorKind::Square, phi, f, grid);
    case DecompositionKind::M: return decompose_sm(OperatorKind::Maximal, phi, f, grid);
  }
  throw std::invalid_argument("unknown decomposition kind");
}

StoppingTime stopping_time_regular(const AdaptedProcess& gamma, double lambda) {
  const Filtration& F = gamma.filtration();
  const int N = F.horizon();
  double max0 = 0.0;
  for (int n = 0; n <= N; ++n)
    for (double v : gamma.cells(n))
      if (v < 0.0) throw std::invalid_argument("gamma must be nonnegative");
  for (double v : gamma.cells(0)) max0 = std::max(max0, v);
  if (!(lambda > max0)) throw std::invalid_argument("lambda must exceed max gamma_0");

  std::vector<int> tau(F.num_points(), N + 1);
  for (int n = 0; n < N; ++n) {
    for (const Cell& cell : F.partition(n)) {
      const bool meets = std::any_of(cell.begin(), cell.end(), [&](std::size_t pt) {
        return gamma.at(n + 1, pt) > lambda;
      });
      if (!meets) continue;
      for (std::size_t pt : cell) tau[pt] = std::min(tau[pt], n);
    }
  }
  return StoppingTime(gamma.filtration_ptr(), std::move(tau));
}

StoppingLemmaCheck check_stopping_lemma(const MOFunction& phi, const AdaptedProcess& gamma,
                                        double lambda, const StoppingTime& tau,
                                        const LogGrid& grid) {
  const Filtration& F = gamma.filtration();
  const int N = F.horizon();
  StoppingLemmaCheck out{true, true, 0.0};
  PointSet exceed(F.num_points());
  for (std::size_t i = 0; i < F.num_points(); ++i) {
    double sup = 0.0;
    for (int n = 0; n <= N; ++n) {
      const double v = gamma.at(n, i);
      sup = std::max(sup, v);
      if (n <= tau.at(i) && v > lambda) out.bounded_until_stop = false;
    }
    if (sup > lambda) exceed.insert(i);
  }
  const PointSet stopped = tau.support();
  out.covers_exceedance = exceed.subset_of(stopped);
  const std::vector<double> ts = phi.separable() ? std::vector<double>{1.0} : grid.values();
  for (double t : ts) {
    const double num = phi_measure(phi, F.space(), stopped, t);
    const double den = phi_measure(phi, F.space(), exceed, t);
    if (num == 0.0) continue;
    out.measure_ratio = std::max(out.measure_ratio,
                                 den > 0.0 ? num / den : std::numeric_limits<double>::infinity());
  }
  return out;
}

AtomValidation validate_atom(const MOFunction& phi, const Atom& atom, double q,
                             const LogGrid& grid) {
  const Martingale& a = atom.a;
  const Filtration& F = a.filtration();
  if (!same_filtration(a.filtration_ptr(), atom.nu.filtration_ptr()))
    throw std::invalid_argument("atom and stopping time live on different filtrations");
  AtomValidation out;
  const double tol = 1e-12 * (1.0 + a.max_abs());
  for (int n = 0; n <= F.horizon() && out.pass; ++n)
    for (std::size_t i = 0; i < F.num_points(); ++i)
      if (atom.nu.at(i) >= n && std::abs(a.at(n, i)) > tol) {
        out.pass = false;
        out.failure = AtomValidation::Failure::Vanishing;
        out.level = n;
        out.point = i;
        out.value = a.at(n, i);
        break;
      }
  if (!out.pass) return out;

  const PointSet support = atom.nu.support();
  if (support.empty()) return out;
  const double lux = luxemburg_indicator_norm(phi, F.space(), support);
  out.bound = 1.0 / lux;
  const auto norm = lq_phi_norm(phi, F.space(), apply_operator(atom.kind, a), support, q, grid);
  out.value = norm.value;
  out.t = norm.argmax_t;
  if (norm.value > out.bound * (1.0 + 1e-9)) {
    out.pass = false;
    out.failure = AtomValidation::Failure::Size;
  }
  return out;
}

Martingale reconstruct(const Decomposition& d, std::optional<std::pair<int, int>> range) {
  if (!d.filtration) throw std::invalid_argument("decomposition has no filtration");
  const Filtration& F = *d.filtration;
  const auto [lo, hi] = range.value_or(std::pair{d.k_min, d.k_max});
  std::vector<std::vector<double>> cells(F.horizon() + 1);
  for (int n = 0; n <= F.horizon(); ++n) cells[n].assign(F.cell_count(n), 0.0);
  for (const auto& e : d.entries) {
    if (e.k < lo || e.k > hi || e.mu == 0.0) continue;
    for (int n = 0; n <= F.horizon(); ++n) {
      auto src = e.atom.process().cells(n);
      for (std::size_t c = 0; c < src.size(); ++c) cells[n][c] += e.mu * src[c];
    }
  }
  return Martingale(AdaptedProcess::from_cells(d.filtration, std::move(cells)), 1e-9);
}

double decomposition_norm(const MOFunction& phi, const Decomposition& d,
                          const BisectionOptions& opts) {
  if (d.entries.empty()) return 0.0;
  const ProbSpace& space = d.filtration->space();
  std::vector<std::pair<double, PointSet>> levels;
  for (const auto& e : d.entries) {
    PointSet b = e.nu.support();
    if (!b.empty()) levels.emplace_back(std::ldexp(1.0, e.k), std::move(b));
  }
  if (levels.empty()) return 0.0;
  auto ok = [&](double lambda) {
    for (const auto& [scale, set] : levels)
      if (phi_measure(phi, space, set, scale / lambda) > 1.0) return false;
    return true;
  };
  return infimum_satisfying(ok, std::ldexp(1.0, d.k_max), opts);
}

}  // namespace mhl
