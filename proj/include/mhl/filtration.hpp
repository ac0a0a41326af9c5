#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace mhl {

/// Real-valued function on the sample points, indexed by point.
using PointFunction = std::vector<double>;

/// A cell of a partition: indices of the sample points it contains.
using Cell = std::vector<std::size_t>;
using Partition = std::vector<Cell>;

/// Subset of a finite sample space, stored as a membership mask.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t universe, bool filled = false) : mask_(universe, filled) {}

  static PointSet full(std::size_t universe) { return PointSet(universe, true); }

  template <class Pred>
  static PointSet where(std::size_t universe, Pred&& pred) {
    PointSet s(universe);
    for (std::size_t i = 0; i < universe; ++i) s.mask_[i] = static_cast<bool>(pred(i));
    return s;
  }

  std::size_t universe() const { return mask_.size(); }
  bool contains(std::size_t i) const { return mask_[i]; }
  void insert(std::size_t i) { mask_[i] = true; }
  void erase(std::size_t i) { mask_[i] = false; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool subset_of(const PointSet& other) const;
  std::vector<std::size_t> indices() const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::vector<bool> mask_;
};

/// Finite probability space; every point carries positive mass.
class ProbSpace {
 public:
  explicit ProbSpace(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double prob(std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  double measure(const PointSet& set) const;
  /// Σ f_i p_i
  double integral(std::span<const double> f) const;

 private:
  std::vector<double> probs_;
};

/// Refining chain of partitions P_0 = {Ω} ⊆ P_1 ⊆ … ⊆ P_N over a ProbSpace.
class Filtration {
 public:
  /// Throws std::invalid_argument on a non-refining chain, empty or overlapping
  /// cells, cells that do not cover Ω, a non-trivial P_0, or N < 1.
  Filtration(ProbSpace space, std::vector<Partition> levels);

  /// Uniform dyadic chain on 2^depth equiprobable points.
  static Filtration dyadic(int depth);

  const ProbSpace& space() const { return space_; }
  std::size_t num_points() const { return space_.size(); }
  /// N, the index of the last level.
  int horizon() const { return static_cast<int>(levels_.size()) - 1; }

  const Partition& partition(int n) const { return levels_.at(n); }
  std::size_t cell_count(int n) const { return levels_.at(n).size(); }
  std::size_t cell_of(int n, std::size_t point) const { return cell_index_[n][point]; }
  double cell_prob(int n, std::size_t cell) const { return cell_prob_[n][cell]; }
  /// Cell of level n-1 containing the given level-n cell (n >= 1).
  std::size_t parent_of(int n, std::size_t cell) const { return parent_[n][cell]; }
  /// Cells of level n+1 contained in the given level-n cell (n < N).
  const std::vector<std::size_t>& children(int n, std::size_t cell) const {
    return children_[n][cell];
  }
  /// True when P_N separates every point.
  bool terminal_discrete() const;

  friend bool operator==(const Filtration& a, const Filtration& b);

 private:
  ProbSpace space_;
  std::vector<Partition> levels_;
  std::vector<std::vector<std::size_t>> cell_index_;
  std::vector<std::vector<double>> cell_prob_;
  std::vector<std::vector<std::size_t>> parent_;
  std::vector<std::vector<std::vector<std::size_t>>> children_;
};

using FiltrationPtr = std::shared_ptr<const Filtration>;

FiltrationPtr make_dyadic(int depth);
FiltrationPtr share(Filtration f);

/// Random refining chain: each cell splits into 1..max_children children with
/// masses drawn proportional to U[0.2, 1]. Leaves of level `depth` are the points.
FiltrationPtr random_filtration(std::uint64_t seed, int depth, int max_children);

/// E_n f: on each cell A of P_n, (Σ_{i∈A} f_i p_i) / P(A).
PointFunction conditional_expectation(const Filtration& filtration, std::span<const double> f,
                                      int n);

/// Per-level values v[n][i], constant on every cell of P_n. Values are stored
/// per cell so measurability holds by construction.
class AdaptedProcess {
 public:
  /// Collapses point values to cells; throws std::invalid_argument when a level
  /// is not constant on its cells (absolute tolerance `tol`).
  AdaptedProcess(FiltrationPtr filtration, const std::vector<PointFunction>& point_values,
                 double tol = 1e-12);

  static AdaptedProcess from_cells(FiltrationPtr filtration,
                                   std::vector<std::vector<double>> cell_values);

  const Filtration& filtration() const { return *filtration_; }
  const FiltrationPtr& filtration_ptr() const { return filtration_; }
  int horizon() const { return filtration_->horizon(); }

  double at(int n, std::size_t point) const {
    return cells_[n][filtration_->cell_of(n, point)];
  }
  std::span<const double> cells(int n) const { return cells_[n]; }
  PointFunction level(int n) const;
  std::vector<PointFunction> point_matrix() const;

 private:
  struct CellTag {};
  AdaptedProcess(CellTag, FiltrationPtr filtration, std::vector<std::vector<double>> cells);

  FiltrationPtr filtration_;
  std::vector<std::vector<double>> cells_;
};

/// Adapted process with f_0 = 0 and E_n f_{n+1} = f_n.
class Martingale {
 public:
  /// Throws std::invalid_argument when f_0 != 0 or the martingale identity fails
  /// beyond `tol · (1 + max|f|)`.
  explicit Martingale(AdaptedProcess values, double tol = 1e-12);

  static Martingale zero(FiltrationPtr filtration);

  const AdaptedProcess& process() const { return values_; }
  const Filtration& filtration() const { return values_.filtration(); }
  const FiltrationPtr& filtration_ptr() const { return values_.filtration_ptr(); }
  int horizon() const { return values_.horizon(); }

  double at(int n, std::size_t point) const { return values_.at(n, point); }
  PointFunction level(int n) const { return values_.level(n); }
  PointFunction terminal() const { return values_.level(horizon()); }
  /// d_n f = f_n - f_{n-1}, n >= 1.
  PointFunction difference(int n) const;
  double max_abs() const;

  friend Martingale operator+(const Martingale& a, const Martingale& b);
  friend Martingale operator-(const Martingale& a, const Martingale& b);
  friend Martingale operator*(double c, const Martingale& a);

 private:
  AdaptedProcess values_;
};

/// Checks the martingale identity without constructing; returns max residual.
double martingale_residual(const AdaptedProcess& values);

/// τ: Ω → {0,…,N} ∪ {∞}, with ∞ stored as N+1.
class StoppingTime {
 public:
  /// Throws std::invalid_argument if some {τ ≤ n} is not a union of P_n cells.
  StoppingTime(FiltrationPtr filtration, std::vector<int> values);

  static StoppingTime constant(FiltrationPtr filtration, int value);
  static StoppingTime never(FiltrationPtr filtration);

  const Filtration& filtration() const { return *filtration_; }
  const FiltrationPtr& filtration_ptr() const { return filtration_; }
  int infinity() const { return filtration_->horizon() + 1; }
  int at(std::size_t point) const { return values_[point]; }
  bool finite_at(std::size_t point) const { return values_[point] <= filtration_->horizon(); }
  std::span<const int> values() const { return values_; }
  /// B = {τ < ∞}
  PointSet support() const;

  friend bool operator==(const StoppingTime& a, const StoppingTime& b) {
    return a.values_ == b.values_;
  }

 private:
  FiltrationPtr filtration_;
  std::vector<int> values_;
};

bool same_filtration(const FiltrationPtr& a, const FiltrationPtr& b);

/// f^τ_n = f_{min(τ, n)}.
Martingale stopped_martingale(const Martingale& f, const StoppingTime& tau);

/// f_n = E_n(g - E g).
Martingale martingale_from_terminal(FiltrationPtr filtration, std::span<const double> g);

/// Least R with f_n <= R f_{n-1} for every nonnegative martingale:
/// max over n >= 1 and cells A of P(parent(A)) / P(A).
double regularity_constant(const Filtration& filtration);

/// Martingale with conditionally centered differences. Each cell of P_{n-1}
/// draws an amplitude scale·2^U[-2,2] and per-child values U[-1,1], which are
/// then centered under the children's masses. Generator: std::mt19937_64,
/// doubles taken from the top 53 bits, so output is bit-identical per seed.
Martingale random_martingale(FiltrationPtr filtration, std::uint64_t seed, double scale = 1.0);
Martingale random_martingale(std::uint64_t seed, int depth, double scale = 1.0);

/// Nonnegative adapted process with cell values in [0, scale] for n >= 1 and
/// γ_0 = initial.
AdaptedProcess random_adapted(FiltrationPtr filtration, std::uint64_t seed, double scale = 1.0,
                              double initial = 0.0);

}  // namespace mhl
