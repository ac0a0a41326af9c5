#include "mhl/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mhl/rng.hpp"

namespace mhl {

const char* to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Maximal: return "M";
    case OperatorKind::Square: return "S";
    case OperatorKind::ConditionalSquare: return "s";
  }
  return "?";
}

const char* to_string(HardySpace space) {
  switch (space) {
    case HardySpace::WHs: return "WHs";
    case HardySpace::WHS: return "WHS";
    case HardySpace::WHM: return "WHM";
    case HardySpace::WP: return "WP";
    case HardySpace::WQ: return "WQ";
  }
  return "?";
}

std::vector<PointFunction> operator_path(OperatorKind kind, const Martingale& f) {
  const Filtration& F = f.filtration();
  const std::size_t n_points = F.num_points();
  std::vector<PointFunction> path(F.horizon() + 1, PointFunction(n_points, 0.0));
  if (kind == OperatorKind::Maximal) {
    for (int n = 1; n <= F.horizon(); ++n)
      for (std::size_t i = 0; i < n_points; ++i)
        path[n][i] = std::max(path[n - 1][i], std::abs(f.at(n, i)));
    return path;
  }
  PointFunction sum_sq(n_points, 0.0);
  for (int n = 1; n <= F.horizon(); ++n) {
    PointFunction d2 = f.difference(n);
    for (double& v : d2) v *= v;
    if (kind == OperatorKind::ConditionalSquare) d2 = conditional_expectation(F, d2, n - 1);
    for (std::size_t i = 0; i < n_points; ++i) {
      sum_sq[i] += d2[i];
      path[n][i] = std::sqrt(sum_sq[i]);
    }
  }
  return path;
}

PointFunction apply_operator(OperatorKind kind, const Martingale& f, std::optional<int> n) {
  const int level = n.value_or(f.horizon());
  if (level < 0 || level > f.horizon()) throw std::invalid_argument("operator level out of range");
  return operator_path(kind, f)[level];
}

namespace {

std::vector<PointFunction> constraint_path(EnvelopeKind kind, const Martingale& f) {
  if (kind == EnvelopeKind::Q) return operator_path(OperatorKind::Square, f);
  std::vector<PointFunction> g = f.process().point_matrix();
  for (auto& level : g)
    for (double& v : level) v = std::abs(v);
  return g;
}

}  // namespace

Envelope minimal_envelope(EnvelopeKind kind, const Martingale& f) {
  const Filtration& F = f.filtration();
  const int N = F.horizon();
  const auto g = constraint_path(kind, f);
  std::vector<std::vector<double>> cells(N + 1);
  for (int n = 0; n <= N; ++n) {
    cells[n].assign(F.cell_count(n), 0.0);
    for (std::size_t c = 0; c < F.cell_count(n); ++c) {
      double v = n > 0 ? cells[n - 1][F.parent_of(n, c)] : 0.0;
      if (n < N)
        for (std::size_t pt : F.partition(n)[c]) v = std::max(v, g[n + 1][pt]);
      cells[n][c] = v;
    }
  }
  return Envelope{AdaptedProcess::from_cells(f.filtration_ptr(), std::move(cells))};
}

bool envelope_admissible(EnvelopeKind kind, const Martingale& f,
                         const std::vector<PointFunction>& lambda, double tol) {
  const Filtration& F = f.filtration();
  const int N = F.horizon();
  if (lambda.size() != static_cast<std::size_t>(N + 1)) return false;
  const auto g = constraint_path(kind, f);
  for (int n = 0; n <= N; ++n) {
    if (lambda[n].size() != F.num_points()) return false;
    for (const Cell& cell : F.partition(n))
      for (std::size_t pt : cell)
        if (std::abs(lambda[n][pt] - lambda[n][cell.front()]) > tol) return false;
    for (std::size_t i = 0; i < F.num_points(); ++i) {
      if (lambda[n][i] < -tol) return false;
      if (n > 0 && lambda[n][i] < lambda[n - 1][i] - tol) return false;
      if (n > 0 && g[n][i] > lambda[n - 1][i] + tol) return false;
    }
  }
  return true;
}

PointFunction space_majorant(HardySpace space, const Martingale& f) {
  switch (space) {
    case HardySpace::WHs: return apply_operator(OperatorKind::ConditionalSquare, f);
    case HardySpace::WHS: return apply_operator(OperatorKind::Square, f);
    case HardySpace::WHM: return apply_operator(OperatorKind::Maximal, f);
    case HardySpace::WP: return minimal_envelope(EnvelopeKind::P, f).terminal();
    case HardySpace::WQ: return minimal_envelope(EnvelopeKind::Q, f).terminal();
  }
  throw std::invalid_argument("unknown space");
}

double space_norm(HardySpace space, const MOFunction& phi, const Martingale& f) {
  return weak_norm(phi, f.filtration().space(), space_majorant(space, f));
}

SublinearOperator builtin_operator(OperatorKind kind) {
  return {to_string(kind), [kind](const Martingale& f) { return apply_operator(kind, f); }};
}

std::vector<SublinearSample> sublinear_ensemble(const FiltrationPtr& filtration,
                                                std::uint64_t seed, int count) {
  std::vector<SublinearSample> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const auto k = static_cast<std::uint64_t>(i);
    Rng rng(derive_seed(seed, {k, 2}));
    out.push_back({random_martingale(filtration, derive_seed(seed, {k, 0})),
                   random_martingale(filtration, derive_seed(seed, {k, 1})),
                   rng.uniform(-3.0, 3.0)});
  }
  return out;
}

SublinearityReport check_sublinear(const SublinearOperator& op,
                                   std::span<const SublinearSample> samples) {
  SublinearityReport report;
  report.name = op.name;
  report.samples = samples.size();
  for (const auto& s : samples) {
    const auto tf = op.apply(s.f);
    const auto tg = op.apply(s.g);
    const auto tsum = op.apply(s.f + s.g);
    const auto tscaled = op.apply(s.c * s.f);
    for (std::size_t i = 0; i < tf.size(); ++i) {
      report.subadditivity_violation =
          std::max(report.subadditivity_violation,
                   std::abs(tsum[i]) - std::abs(tf[i]) - std::abs(tg[i]));
      report.homogeneity_violation =
          std::max(report.homogeneity_violation,
                   std::abs(std::abs(tscaled[i]) - std::abs(s.c) * std::abs(tf[i])));
    }
  }
  report.pass = report.subadditivity_violation <= 1e-9 && report.homogeneity_violation <= 1e-9;
  return report;
}

}  // namespace mhl
