#include "mhl/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mhl/rng.hpp"

namespace mhl {

namespace {

constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

std::size_t PointSet::count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true));
}

bool PointSet::subset_of(const PointSet& other) const {
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i] && !other.mask_[i]) return false;
  return true;
}

std::vector<std::size_t> PointSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i]) out.push_back(i);
  return out;
}

ProbSpace::ProbSpace(std::vector<double> probs) : probs_(std::move(probs)) {
  require(!probs_.empty(), "probability space must have at least one point");
  double total = 0.0;
  for (double p : probs_) {
    require(std::isfinite(p) && p > 0.0, "every point probability must be positive and finite");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, "point probabilities must sum to 1");
}

double ProbSpace::measure(const PointSet& set) const {
  double m = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i)
    if (set.contains(i)) m += probs_[i];
  return m;
}

double ProbSpace::integral(std::span<const double> f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) s += f[i] * probs_[i];
  return s;
}

Filtration::Filtration(ProbSpace space, std::vector<Partition> levels)
    : space_(std::move(space)), levels_(std::move(levels)) {
  const std::size_t n_points = space_.size();
  require(levels_.size() >= 2, "filtration needs at least two levels (N >= 1)");
  require(levels_[0].size() == 1, "P_0 must be the trivial partition {Omega}");

  cell_index_.assign(levels_.size(), std::vector<std::size_t>(n_points, kUnassigned));
  cell_prob_.resize(levels_.size());
  for (std::size_t n = 0; n < levels_.size(); ++n) {
    const Partition& part = levels_[n];
    cell_prob_[n].assign(part.size(), 0.0);
    for (std::size_t c = 0; c < part.size(); ++c) {
      require(!part[c].empty(), "empty cell at level " + std::to_string(n));
      for (std::size_t pt : part[c]) {
        require(pt < n_points, "cell references unknown point " + std::to_string(pt));
        require(cell_index_[n][pt] == kUnassigned,
                "point " + std::to_string(pt) + " appears twice at level " + std::to_string(n));
        cell_index_[n][pt] = c;
        cell_prob_[n][c] += space_.prob(pt);
      }
    }
    for (std::size_t pt = 0; pt < n_points; ++pt)
      require(cell_index_[n][pt] != kUnassigned,
              "level " + std::to_string(n) + " does not cover point " + std::to_string(pt));
  }

  parent_.resize(levels_.size());
  children_.resize(levels_.size());
  for (std::size_t n = 1; n < levels_.size(); ++n) {
    parent_[n].assign(levels_[n].size(), 0);
    children_[n - 1].assign(levels_[n - 1].size(), {});
    for (std::size_t c = 0; c < levels_[n].size(); ++c) {
      const std::size_t parent = cell_index_[n - 1][levels_[n][c].front()];
      for (std::size_t pt : levels_[n][c])
        require(cell_index_[n - 1][pt] == parent,
                "level " + std::to_string(n) + " does not refine level " + std::to_string(n - 1));
      parent_[n][c] = parent;
      children_[n - 1][parent].push_back(c);
    }
  }
  children_.back().assign(levels_.back().size(), {});
}

Filtration Filtration::dyadic(int depth) {
  require(depth >= 1, "dyadic depth must be >= 1");
  require(depth <= 24, "dyadic depth too large");
  const std::size_t n_points = std::size_t{1} << depth;
  std::vector<double> probs(n_points, std::ldexp(1.0, -depth));
  std::vector<Partition> levels(depth + 1);
  for (int n = 0; n <= depth; ++n) {
    const std::size_t cells = std::size_t{1} << n;
    const std::size_t width = n_points / cells;
    levels[n].resize(cells);
    for (std::size_t c = 0; c < cells; ++c) {
      levels[n][c].resize(width);
      std::iota(levels[n][c].begin(), levels[n][c].end(), c * width);
    }
  }
  return Filtration(ProbSpace(std::move(probs)), std::move(levels));
}

bool Filtration::terminal_discrete() const { return levels_.back().size() == num_points(); }

bool operator==(const Filtration& a, const Filtration& b) {
  if (a.num_points() != b.num_points() || a.horizon() != b.horizon()) return false;
  if (!std::equal(a.space_.probs().begin(), a.space_.probs().end(), b.space_.probs().begin()))
    return false;
  return a.cell_index_ == b.cell_index_;
}

FiltrationPtr make_dyadic(int depth) { return share(Filtration::dyadic(depth)); }

FiltrationPtr share(Filtration f) { return std::make_shared<const Filtration>(std::move(f)); }

FiltrationPtr random_filtration(std::uint64_t seed, int depth, int max_children) {
  require(depth >= 1, "depth must be >= 1");
  require(max_children >= 1, "max_children must be >= 1");
  Rng rng(seed);
  // masses[n][c]; child ranges stored as first child index + count.
  std::vector<std::vector<double>> masses{{1.0}};
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> kids;
  for (int n = 0; n < depth; ++n) {
    std::vector<double> next;
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    for (double m : masses[n]) {
      const int k = rng.integer(1, max_children);
      std::vector<double> w(k);
      for (double& x : w) x = rng.uniform(0.2, 1.0);
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      ranges.emplace_back(next.size(), static_cast<std::size_t>(k));
      for (double x : w) next.push_back(k == 1 ? m : m * x / total);
    }
    masses.push_back(std::move(next));
    kids.push_back(std::move(ranges));
  }
  // Leaves are the points; each cell covers a contiguous range of leaves.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> leaf_range(depth + 1);
  leaf_range[depth].resize(masses[depth].size());
  for (std::size_t c = 0; c < masses[depth].size(); ++c) leaf_range[depth][c] = {c, c + 1};
  for (int n = depth - 1; n >= 0; --n) {
    leaf_range[n].resize(masses[n].size());
    for (std::size_t c = 0; c < masses[n].size(); ++c) {
      const auto [first, count] = kids[n][c];
      leaf_range[n][c] = {leaf_range[n + 1][first].first,
                          leaf_range[n + 1][first + count - 1].second};
    }
  }
  std::vector<Partition> levels(depth + 1);
  for (int n = 0; n <= depth; ++n) {
    for (const auto& [lo, hi] : leaf_range[n]) {
      Cell cell(hi - lo);
      std::iota(cell.begin(), cell.end(), lo);
      levels[n].push_back(std::move(cell));
    }
  }
  return share(Filtration(ProbSpace(masses[depth]), std::move(levels)));
}

PointFunction conditional_expectation(const Filtration& filtration, std::span<const double> f,
                                      int n) {
  require(n >= 0 && n <= filtration.horizon(), "level out of range");
  require(f.size() == filtration.num_points(), "function size does not match sample space");
  const auto& space = filtration.space();
  PointFunction out(f.size());
  for (const Cell& cell : filtration.partition(n)) {
    if (cell.size() == 1) {
      out[cell[0]] = f[cell[0]];
      continue;
    }
    double num = 0.0, den = 0.0;
    for (std::size_t pt : cell) {
      num += f[pt] * space.prob(pt);
      den += space.prob(pt);
    }
    const double v = num / den;
    for (std::size_t pt : cell) out[pt] = v;
  }
  return out;
}

AdaptedProcess::AdaptedProcess(CellTag, FiltrationPtr filtration,
                               std::vector<std::vector<double>> cells)
    : filtration_(std::move(filtration)), cells_(std::move(cells)) {}

AdaptedProcess::AdaptedProcess(FiltrationPtr filtration,
                               const std::vector<PointFunction>& point_values, double tol)
    : filtration_(std::move(filtration)) {
  require(filtration_ != nullptr, "null filtration");
  const Filtration& F = *filtration_;
  require(point_values.size() == static_cast<std::size_t>(F.horizon() + 1),
          "process must have N+1 levels");
  cells_.resize(point_values.size());
  for (int n = 0; n <= F.horizon(); ++n) {
    const PointFunction& v = point_values[n];
    require(v.size() == F.num_points(), "level size does not match sample space");
    cells_[n].resize(F.cell_count(n));
    for (std::size_t c = 0; c < F.cell_count(n); ++c) {
      const Cell& cell = F.partition(n)[c];
      const double ref = v[cell.front()];
      for (std::size_t pt : cell)
        require(std::abs(v[pt] - ref) <= tol * (1.0 + std::abs(ref)),
                "values at level " + std::to_string(n) + " are not F_n-measurable");
      cells_[n][c] = ref;
    }
  }
}

AdaptedProcess AdaptedProcess::from_cells(FiltrationPtr filtration,
                                          std::vector<std::vector<double>> cell_values) {
  require(filtration != nullptr, "null filtration");
  require(cell_values.size() == static_cast<std::size_t>(filtration->horizon() + 1),
          "process must have N+1 levels");
  for (int n = 0; n <= filtration->horizon(); ++n)
    require(cell_values[n].size() == filtration->cell_count(n), "cell count mismatch");
  return AdaptedProcess(CellTag{}, std::move(filtration), std::move(cell_values));
}

PointFunction AdaptedProcess::level(int n) const {
  PointFunction out(filtration_->num_points());
  for (std::size_t pt = 0; pt < out.size(); ++pt) out[pt] = at(n, pt);
  return out;
}

std::vector<PointFunction> AdaptedProcess::point_matrix() const {
  std::vector<PointFunction> out;
  out.reserve(cells_.size());
  for (int n = 0; n <= horizon(); ++n) out.push_back(level(n));
  return out;
}

double martingale_residual(const AdaptedProcess& values) {
  const Filtration& F = values.filtration();
  double residual = 0.0;
  for (double v : values.cells(0)) residual = std::max(residual, std::abs(v));
  for (int n = 0; n < F.horizon(); ++n) {
    for (std::size_t c = 0; c < F.cell_count(n); ++c) {
      double mean = 0.0;
      for (std::size_t child : F.children(n, c))
        mean += F.cell_prob(n + 1, child) * values.cells(n + 1)[child];
      mean /= F.cell_prob(n, c);
      residual = std::max(residual, std::abs(mean - values.cells(n)[c]));
    }
  }
  return residual;
}

Martingale::Martingale(AdaptedProcess values, double tol) : values_(std::move(values)) {
  const double scale = 1.0 + max_abs();
  require(martingale_residual(values_) <= tol * scale,
          "values violate f_0 = 0 or E_n f_{n+1} = f_n");
}

Martingale Martingale::zero(FiltrationPtr filtration) {
  std::vector<std::vector<double>> cells(filtration->horizon() + 1);
  for (int n = 0; n <= filtration->horizon(); ++n) cells[n].assign(filtration->cell_count(n), 0.0);
  return Martingale(AdaptedProcess::from_cells(std::move(filtration), std::move(cells)));
}

PointFunction Martingale::difference(int n) const {
  require(n >= 1 && n <= horizon(), "difference index out of range");
  PointFunction d = level(n);
  for (std::size_t pt = 0; pt < d.size(); ++pt) d[pt] -= at(n - 1, pt);
  return d;
}

double Martingale::max_abs() const {
  double m = 0.0;
  for (int n = 0; n <= horizon(); ++n)
    for (double v : values_.cells(n)) m = std::max(m, std::abs(v));
  return m;
}

namespace {

template <class Op>
Martingale combine(const Martingale& a, const Martingale& b, Op op) {
  require(same_filtration(a.filtration_ptr(), b.filtration_ptr()),
          "martingales live on different filtrations");
  std::vector<std::vector<double>> cells(a.horizon() + 1);
  for (int n = 0; n <= a.horizon(); ++n) {
    auto ca = a.process().cells(n);
    auto cb = b.process().cells(n);
    cells[n].resize(ca.size());
    for (std::size_t c = 0; c < ca.size(); ++c) cells[n][c] = op(ca[c], cb[c]);
  }
  return Martingale(AdaptedProcess::from_cells(a.filtration_ptr(), std::move(cells)), 1e-9);
}

}  // namespace

Martingale operator+(const Martingale& a, const Martingale& b) {
  return combine(a, b, [](double x, double y) { return x + y; });
}

Martingale operator-(const Martingale& a, const Martingale& b) {
  return combine(a, b, [](double x, double y) { return x - y; });
}

Martingale operator*(double c, const Martingale& a) {
  return combine(a, a, [c](double x, double) { return c * x; });
}

StoppingTime::StoppingTime(FiltrationPtr filtration, std::vector<int> values)
    : filtration_(std::move(filtration)), values_(std::move(values)) {
  require(filtration_ != nullptr, "null filtration");
  const Filtration& F = *filtration_;
  require(values_.size() == F.num_points(), "stopping time size does not match sample space");
  for (int v : values_) require(v >= 0 && v <= F.horizon() + 1, "stopping time value out of range");
  for (int n = 0; n <= F.horizon(); ++n) {
    for (const Cell& cell : F.partition(n)) {
      const bool first = values_[cell.front()] <= n;
      for (std::size_t pt : cell)
        require((values_[pt] <= n) == first,
                "{tau <= " + std::to_string(n) + "} is not F_" + std::to_string(n) + "-measurable");
    }
  }
}

StoppingTime StoppingTime::constant(FiltrationPtr filtration, int value) {
  const std::size_t n = filtration->num_points();
  return StoppingTime(std::move(filtration), std::vector<int>(n, value));
}

StoppingTime StoppingTime::never(FiltrationPtr filtration) {
  const int inf = filtration->horizon() + 1;
  return constant(std::move(filtration), inf);
}

PointSet StoppingTime::support() const {
  return PointSet::where(values_.size(), [&](std::size_t i) { return finite_at(i); });
}

bool same_filtration(const FiltrationPtr& a, const FiltrationPtr& b) {
  return a == b || (a && b && *a == *b);
}

Martingale stopped_martingale(const Martingale& f, const StoppingTime& tau) {
  require(same_filtration(f.filtration_ptr(), tau.filtration_ptr()),
          "stopping time and martingale live on different filtrations");
  const Filtration& F = f.filtration();
  std::vector<PointFunction> values(F.horizon() + 1, PointFunction(F.num_points()));
  for (int n = 0; n <= F.horizon(); ++n)
    for (std::size_t pt = 0; pt < F.num_points(); ++pt)
      values[n][pt] = f.at(std::min(tau.at(pt), n), pt);
  return Martingale(AdaptedProcess(f.filtration_ptr(), values, 0.0), 1e-9);
}

Martingale martingale_from_terminal(FiltrationPtr filtration, std::span<const double> g) {
  const Filtration& F = *filtration;
  require(g.size() == F.num_points(), "terminal function size does not match sample space");
  const double mean = F.space().integral(g);
  std::vector<PointFunction> values(F.horizon() + 1);
  values[0].assign(F.num_points(), 0.0);
  for (int n = 1; n <= F.horizon(); ++n) {
    values[n] = conditional_expectation(F, g, n);
    for (double& v : values[n]) v -= mean;
  }
  return Martingale(AdaptedProcess(std::move(filtration), values, 0.0), 1e-9);
}

double regularity_constant(const Filtration& filtration) {
  double r = 1.0;
  for (int n = 1; n <= filtration.horizon(); ++n)
    for (std::size_t c = 0; c < filtration.cell_count(n); ++c)
      r = std::max(r, filtration.cell_prob(n - 1, filtration.parent_of(n, c)) /
                          filtration.cell_prob(n, c));
  return r;
}

Martingale random_martingale(FiltrationPtr filtration, std::uint64_t seed, double scale) {
  const Filtration& F = *filtration;
  Rng rng(seed);
  std::vector<std::vector<double>> cells(F.horizon() + 1);
  cells[0].assign(1, 0.0);
  for (int n = 1; n <= F.horizon(); ++n) {
    cells[n].assign(F.cell_count(n), 0.0);
    for (std::size_t parent = 0; parent < F.cell_count(n - 1); ++parent) {
      const auto& kids = F.children(n - 1, parent);
      const double amplitude = scale * std::exp2(rng.uniform(-2.0, 2.0));
      std::vector<double> z(kids.size());
      double mean = 0.0;
      for (std::size_t j = 0; j < kids.size(); ++j) {
        z[j] = rng.uniform(-1.0, 1.0);
        mean += F.cell_prob(n, kids[j]) * z[j];
      }
      mean /= F.cell_prob(n - 1, parent);
      for (std::size_t j = 0; j < kids.size(); ++j) {
        const double d = kids.size() == 1 ? 0.0 : amplitude * (z[j] - mean);
        cells[n][kids[j]] = cells[n - 1][parent] + d;
      }
    }
  }
  return Martingale(AdaptedProcess::from_cells(std::move(filtration), std::move(cells)), 1e-9);
}

Martingale random_martingale(std::uint64_t seed, int depth, double scale) {
  return random_martingale(make_dyadic(depth), seed, scale);
}

AdaptedProcess random_adapted(FiltrationPtr filtration, std::uint64_t seed, double scale,
                              double initial) {
  const Filtration& F = *filtration;
  Rng rng(seed);
  std::vector<std::vector<double>> cells(F.horizon() + 1);
  cells[0].assign(1, initial);
  for (int n = 1; n <= F.horizon(); ++n) {
    cells[n].resize(F.cell_count(n));
    for (double& v : cells[n]) v = rng.uniform(0.0, scale);
  }
  return AdaptedProcess::from_cells(std::move(filtration), std::move(cells));
}

}  // namespace mhl
