#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mhl/bisection.hpp"
#include "mhl/filtration.hpp"

namespace mhl {

/// Orlicz profile Φ(t) used by the orlicz and weighted kinds.
class OrliczProfile {
 public:
  enum class Shape { Power, PowerLog };

  /// Φ(t) = t^p
  static OrliczProfile power(double p);
  /// Φ(t) = t^p · ln(e + t); lower type p, upper type p + 1, both with constant 1.
  static OrliczProfile power_log(double p);

  double operator()(double t) const;
  Shape shape() const { return shape_; }
  double exponent() const { return p_; }
  double lower_index() const { return p_; }
  double upper_index() const { return shape_ == Shape::Power ? p_ : p_ + 1.0; }

 private:
  OrliczProfile(Shape shape, double p) : shape_(shape), p_(p) {}
  Shape shape_;
  double p_;
};

enum class PhiKind { Power, Orlicz, Weighted, Variable, Custom };

/// Declared uniform type indices and their constants.
struct TypeIndices {
  double p_minus = 1.0;
  double p_plus = 1.0;
  double c_lower = 1.0;
  double c_upper = 1.0;
};

/// Musielak-Orlicz function φ(x, t) on the points of a finite space.
/// φ(x, 0) = 0 always; evaluators are only called with t > 0.
class MOFunction {
 public:
  using Evaluator = std::function<double(std::size_t point, double t)>;

  static MOFunction power(double p);
  static MOFunction orlicz(OrliczProfile profile);
  /// φ(x,t) = w(x) Φ(t), w > 0.
  static MOFunction weighted(std::vector<double> w, OrliczProfile profile);
  /// φ(x,t) = t^{p(x)}, p > 0.
  static MOFunction variable(std::vector<double> p);
  /// A custom evaluator must be positive for t > 0 and nondecreasing in t.
  /// Discontinuous evaluators fall back to a dense α-grid in the weak norm.
  static MOFunction custom(std::string name, Evaluator eval, TypeIndices indices,
                           bool continuous, std::optional<std::size_t> points = std::nullopt);

  double operator()(std::size_t x, double t) const;

  PhiKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  /// φ(x,t) = weight(x)·profile(t) exactly.
  bool separable() const;
  double weight(std::size_t x) const;
  double profile(double t) const;
  bool continuous() const { return continuous_; }
  const TypeIndices& indices() const { return indices_; }
  double p_minus() const { return indices_.p_minus; }
  double p_plus() const { return indices_.p_plus; }

  /// Number of points the function is defined on, if it depends on x.
  std::optional<std::size_t> required_points() const { return points_; }
  /// Throws std::invalid_argument when defined on a different number of points.
  void require_points(std::size_t n) const;

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& exponents() const { return exponents_; }
  const std::optional<OrliczProfile>& orlicz_profile() const { return profile_; }

 private:
  MOFunction() = default;

  PhiKind kind_ = PhiKind::Power;
  std::string name_;
  std::optional<OrliczProfile> profile_;
  std::vector<double> weights_;
  std::vector<double> exponents_;
  Evaluator custom_;
  TypeIndices indices_;
  bool continuous_ = true;
  std::optional<std::size_t> points_;
};

/// Log-uniform grid; default is the t-range used for non-separable φ.
struct LogGrid {
  double lo = 1e-4;
  double hi = 1e4;
  int points = 64;

  std::vector<double> values() const;
};

/// φ(E, t) = Σ_{i∈E} φ(x_i, t) p_i. Throws for t <= 0.
double phi_measure(const MOFunction& phi, const ProbSpace& space, const PointSet& set, double t);

enum class TypeSide { Lower, Upper };

struct TypeReport {
  double p = 0.0;
  TypeSide side = TypeSide::Lower;
  double best_constant = 0.0;
  double declared_constant = 1.0;
  bool pass = false;
};

/// Default scale grid: 64 log-spaced s in [1e-4, 1) (lower) or [1, 1e4] (upper).
std::vector<double> default_s_grid(TypeSide side);

/// Best C with φ(x, st) <= C s^p φ(x, t) over the grids and all points. Passes
/// when C is finite and within the declared constant for that side.
TypeReport verify_uniform_type(const MOFunction& phi, const ProbSpace& space, double p,
                               TypeSide side, std::span<const double> s_grid,
                               std::span<const double> t_grid);

/// inf{λ > 0 : φ(B, 1/λ) <= 1}; 0 for B = ∅.
double luxemburg_indicator_norm(const MOFunction& phi, const ProbSpace& space, const PointSet& set,
                                const BisectionOptions& opts = {});

/// sup_{α>0} φ({|f| > α}, α/λ), reduced to the distinct values of |f|.
double weak_constraint(const MOFunction& phi, const ProbSpace& space, std::span<const double> f,
                       double lambda);

/// ‖f‖_{WL_φ} = inf{λ > 0 : weak_constraint(λ) <= 1}.
double weak_norm(const MOFunction& phi, const ProbSpace& space, std::span<const double> f,
                 const BisectionOptions& opts = {});

/// ρ_φ(f) = sup_α φ({|f| > α}, α).
double modular_rho(const MOFunction& phi, const ProbSpace& space, std::span<const double> f);

struct LqPhiNorm {
  double value = 0.0;
  /// t attaining the grid supremum; NaN when the ratio is t-free or q = ∞.
  double argmax_t = std::numeric_limits<double>::quiet_NaN();
};

/// ‖f‖_{L^q_φ(B)}: sup_t [φ(B,t)^{-1} ∫_Ω |f|^q φ(·,t) dP]^{1/q} for q < ∞,
/// ‖f‖_∞ for q = ∞. Separable φ is evaluated exactly without the grid.
LqPhiNorm lq_phi_norm(const MOFunction& phi, const ProbSpace& space, std::span<const double> f,
                      const PointSet& set, double q, const LogGrid& grid = {});

}  // namespace mhl
