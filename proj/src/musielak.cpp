#include "mhl/musielak.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mhl {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

/// Level sets {|f| >= v} for the distinct nonzero values v of |f|, largest first.
struct LevelSets {
  std::vector<double> values;
  std::vector<std::size_t> order;
  std::vector<std::size_t> ends;
  std::vector<double> prefix_weight;  // Σ w_i p_i over the prefix (separable φ)

  LevelSets(const MOFunction& phi, const ProbSpace& space, std::span<const double> f) {
    require(f.size() == space.size(), "function size does not match sample space");
    for (std::size_t i = 0; i < f.size(); ++i) {
      require(std::isfinite(f[i]), "function must be finite-valued");
      if (f[i] != 0.0) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(f[a]) > std::abs(f[b]); });
    double acc = 0.0;
    for (std::size_t j = 0; j < order.size(); ++j) {
      const double v = std::abs(f[order[j]]);
      if (values.empty() || v != values.back()) {
        if (!values.empty()) {
          ends.push_back(j);
          prefix_weight.push_back(acc);
        }
        values.push_back(v);
      }
      if (phi.separable()) acc += phi.weight(order[j]) * space.prob(order[j]);
    }
    if (!values.empty()) {
      ends.push_back(order.size());
      prefix_weight.push_back(acc);
    }
  }

  bool empty() const { return values.empty(); }

  /// φ({|f| >= values[g]}, t)
  double measure(const MOFunction& phi, const ProbSpace& space, std::size_t g, double t) const {
    if (phi.separable()) return phi.profile(t) * prefix_weight[g];
    double m = 0.0;
    for (std::size_t j = 0; j < ends[g]; ++j) m += phi(order[j], t) * space.prob(order[j]);
    return m;
  }

  double sup_over_alpha(const MOFunction& phi, const ProbSpace& space, double lambda) const {
    double sup = 0.0;
    for (std::size_t g = 0; g < values.size(); ++g) {
      if (phi.continuous()) {
        // Left limit at α = v_g of a nondecreasing, continuous map.
        sup = std::max(sup, measure(phi, space, g, values[g] / lambda));
        continue;
      }
      const double below = g + 1 < values.size() ? values[g + 1] : 0.0;
      for (int j = 0; j <= 40; ++j) {
        const double alpha = below + (values[g] - below) * (1.0 - std::ldexp(1.0, -j));
        if (alpha <= 0.0) continue;
        sup = std::max(sup, measure(phi, space, g, alpha / lambda));
      }
    }
    return sup;
  }
};

}  // namespace

OrliczProfile OrliczProfile::power(double p) {
  require(std::isfinite(p) && p > 0.0, "Orlicz exponent must be positive");
  return OrliczProfile(Shape::Power, p);
}

OrliczProfile OrliczProfile::power_log(double p) {
  require(std::isfinite(p) && p > 0.0, "Orlicz exponent must be positive");
  return OrliczProfile(Shape::PowerLog, p);
}

double OrliczProfile::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  const double base = std::pow(t, p_);
  return shape_ == Shape::Power ? base : base * std::log(std::numbers::e + t);
}

MOFunction MOFunction::power(double p) {
  require(std::isfinite(p) && p > 0.0, "power exponent must be positive");
  MOFunction phi;
  phi.kind_ = PhiKind::Power;
  phi.name_ = "power";
  phi.profile_ = OrliczProfile::power(p);
  phi.indices_ = {p, p, 1.0, 1.0};
  return phi;
}

MOFunction MOFunction::orlicz(OrliczProfile profile) {
  MOFunction phi;
  phi.kind_ = PhiKind::Orlicz;
  phi.name_ = "orlicz";
  phi.indices_ = {profile.lower_index(), profile.upper_index(), 1.0, 1.0};
  phi.profile_ = profile;
  return phi;
}

MOFunction MOFunction::weighted(std::vector<double> w, OrliczProfile profile) {
  require(!w.empty(), "weight vector must be nonempty");
  for (double x : w) require(std::isfinite(x) && x > 0.0, "weights must be positive and finite");
  MOFunction phi = orlicz(profile);
  phi.kind_ = PhiKind::Weighted;
  phi.name_ = "weighted";
  phi.points_ = w.size();
  phi.weights_ = std::move(w);
  return phi;
}

MOFunction MOFunction::variable(std::vector<double> p) {
  require(!p.empty(), "exponent vector must be nonempty");
  for (double x : p) require(std::isfinite(x) && x > 0.0, "exponents must be positive and finite");
  MOFunction phi;
  phi.kind_ = PhiKind::Variable;
  phi.name_ = "variable";
  const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
  phi.indices_ = {*lo, *hi, 1.0, 1.0};
  phi.points_ = p.size();
  phi.exponents_ = std::move(p);
  return phi;
}

MOFunction MOFunction::custom(std::string name, Evaluator eval, TypeIndices indices,
                              bool continuous, std::optional<std::size_t> points) {
  require(static_cast<bool>(eval), "custom evaluator is empty");
  MOFunction phi;
  phi.kind_ = PhiKind::Custom;
  phi.name_ = std::move(name);
  phi.custom_ = std::move(eval);
  phi.indices_ = indices;
  phi.continuous_ = continuous;
  phi.points_ = points;
  return phi;
}

double MOFunction::operator()(std::size_t x, double t) const {
  if (t <= 0.0) return 0.0;
  switch (kind_) {
    case PhiKind::Power:
    case PhiKind::Orlicz:
      return (*profile_)(t);
    case PhiKind::Weighted:
      return weights_[x] * (*profile_)(t);
    case PhiKind::Variable:
      return std::pow(t, exponents_[x]);
    case PhiKind::Custom:
      return custom_(x, t);
  }
  return 0.0;
}

bool MOFunction::separable() const {
  return kind_ == PhiKind::Power || kind_ == PhiKind::Orlicz || kind_ == PhiKind::Weighted;
}

double MOFunction::weight(std::size_t x) const {
  return kind_ == PhiKind::Weighted ? weights_[x] : 1.0;
}

double MOFunction::profile(double t) const { return profile_ ? (*profile_)(t) : 0.0; }

void MOFunction::require_points(std::size_t n) const {
  if (points_ && *points_ != n)
    throw std::invalid_argument("Musielak-Orlicz function is defined on " +
                                std::to_string(*points_) + " points, sample space has " +
                                std::to_string(n));
}

std::vector<double> LogGrid::values() const {
  require(points >= 1 && lo > 0.0 && hi >= lo, "degenerate log grid");
  std::vector<double> out(points);
  if (points == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i) out[i] = std::exp(a + (b - a) * i / (points - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

double phi_measure(const MOFunction& phi, const ProbSpace& space, const PointSet& set, double t) {
  require(t > 0.0, "phi_measure requires t > 0");
  phi.require_points(space.size());
  double m = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i)
    if (set.contains(i)) m += phi(i, t) * space.prob(i);
  return m;
}

std::vector<double> default_s_grid(TypeSide side) {
  std::vector<double> s(64);
  const double a = std::log(1e-4);
  for (int i = 0; i < 64; ++i) {
    if (side == TypeSide::Lower)
      s[i] = std::exp(a * (1.0 - i / 64.0));  // 1e-4 .. just below 1
    else
      s[i] = std::exp(-a * i / 63.0);  // 1 .. 1e4
  }
  return s;
}

TypeReport verify_uniform_type(const MOFunction& phi, const ProbSpace& space, double p,
                               TypeSide side, std::span<const double> s_grid,
                               std::span<const double> t_grid) {
  require(p > 0.0, "type exponent must be positive");
  require(!s_grid.empty() && !t_grid.empty(), "degenerate grid");
  for (double s : s_grid)
    require(side == TypeSide::Lower ? (s > 0.0 && s < 1.0) : s >= 1.0,
            "scale grid does not match the tested side");
  for (double t : t_grid) require(t > 0.0, "t-grid must be positive");
  phi.require_points(space.size());

  TypeReport report;
  report.p = p;
  report.side = side;
  report.declared_constant =
      side == TypeSide::Lower ? phi.indices().c_lower : phi.indices().c_upper;
  double best = 0.0;
  for (std::size_t x = 0; x < space.size(); ++x)
    for (double s : s_grid)
      for (double t : t_grid)
        best = std::max(best, phi(x, s * t) / (std::pow(s, p) * phi(x, t)));
  report.best_constant = best;
  report.pass = std::isfinite(best) && best <= report.declared_constant * (1.0 + 1e-9);
  return report;
}

double luxemburg_indicator_norm(const MOFunction& phi, const ProbSpace& space, const PointSet& set,
                                const BisectionOptions& opts) {
  phi.require_points(space.size());
  if (set.empty()) return 0.0;
  return infimum_satisfying(
      [&](double lambda) { return phi_measure(phi, space, set, 1.0 / lambda) <= 1.0; }, 1.0, opts);
}

double weak_constraint(const MOFunction& phi, const ProbSpace& space, std::span<const double> f,
                       double lambda) {
  require(lambda > 0.0, "lambda must be positive");
  phi.require_points(space.size());
  return LevelSets(phi, space, f).sup_over_alpha(phi, space, lambda);
}

double weak_norm(const MOFunction& phi, const ProbSpace& space, std::span<const double> f,
                 const BisectionOptions& opts) {
  phi.require_points(space.size());
  const LevelSets levels(phi, space, f);
  if (levels.empty()) return 0.0;
  return infimum_satisfying(
      [&](double lambda) { return levels.sup_over_alpha(phi, space, lambda) <= 1.0; },
      levels.values.front(), opts);
}

double modular_rho(const MOFunction& phi, const ProbSpace& space, std::span<const double> f) {
  return weak_constraint(phi, space, f, 1.0);
}

LqPhiNorm lq_phi_norm(const MOFunction& phi, const ProbSpace& space, std::span<const double> f,
                      const PointSet& set, double q, const LogGrid& grid) {
  require(q > 1.0, "exponent q must lie in (1, inf]");
  require(f.size() == space.size(), "function size does not match sample space");
  phi.require_points(space.size());
  LqPhiNorm out;
  if (std::isinf(q)) {
    for (double v : f) out.value = std::max(out.value, std::abs(v));
    return out;
  }
  require(!set.empty(), "L^q_phi(B) norm needs a nonempty B for finite q");
  if (phi.separable()) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
      const double wp = phi.weight(i) * space.prob(i);
      num += std::pow(std::abs(f[i]), q) * wp;
      if (set.contains(i)) den += wp;
    }
    out.value = std::pow(num / den, 1.0 / q);
    return out;
  }
  for (double t : grid.values()) {
    double num = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i)
      num += std::pow(std::abs(f[i]), q) * phi(i, t) * space.prob(i);
    const double v = std::pow(num / phi_measure(phi, space, set, t), 1.0 / q);
    if (v > out.value || std::isnan(out.argmax_t)) {
      out.value = std::max(out.value, v);
      out.argmax_t = t;
    }
  }
  return out;
}

}  // namespace mhl
