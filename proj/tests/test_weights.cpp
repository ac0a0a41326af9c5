#include <doctest.h>

#include <cmath>

#include "mhl/rng.hpp"
#include "mhl/weights.hpp"
#include "support.hpp"

using namespace mhl;

namespace {

const Filtration& two() {
  static const Filtration F(ProbSpace({0.5, 0.5}), {{{0, 1}}, {{0}, {1}}});
  return F;
}

/// Brute-force A_q constant for separable φ = w(x)Φ(t) at t = 1.
double aq_oracle(const Filtration& F, const std::vector<double>& w, double q) {
  double best = 0.0;
  for (int n = 0; n <= F.horizon(); ++n) {
    const auto ew = oracle::cond_exp(F, w, n);
    std::vector<double> inv(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      inv[i] = q == 1.0 ? 1.0 / w[i] : std::pow(w[i], -1.0 / (q - 1.0));
    const auto einv = oracle::cond_exp(F, inv, n);
    for (std::size_t i = 0; i < w.size(); ++i)
      best = std::max(best, q == 1.0 ? ew[i] / w[i] : ew[i] * std::pow(einv[i], q - 1.0));
  }
  return best;
}

/// Least K with K^{-1} w_{n-1} <= w_n <= K w_{n-1} (two-sided).
double s_oracle(const Filtration& F, const std::vector<double>& w) {
  double best = 1.0;
  for (int n = 1; n <= F.horizon(); ++n) {
    const auto a = oracle::cond_exp(F, w, n);
    const auto b = oracle::cond_exp(F, w, n - 1);
    for (std::size_t i = 0; i < w.size(); ++i) best = std::max({best, a[i] / b[i], b[i] / a[i]});
  }
  return best;
}

}  // namespace

TEST_CASE("A_q for an x-independent phi is 1") {
  const auto F = Filtration::dyadic(3);
  for (double q : {1.0, 1.5, 2.0, 5.0}) {
    const auto r = check_aq(F, MOFunction::power(0.7), q);
    CHECK(r.pass);
    CHECK(r.constant == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto r = check_aq(F, MOFunction::orlicz(OrliczProfile::power_log(1)), 2.0);
  CHECK(r.constant == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("A_2 two-point example") {
  const auto phi = MOFunction::weighted({1, 3}, OrliczProfile::power(1));
  const auto r = check_aq(two(), phi, 2.0);
  CHECK(r.constant == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(r.level == 0);
  CHECK(r.t_free);
  CHECK(r.pass);
  CHECK_THROWS_AS(check_aq(two(), phi, 0.5), std::invalid_argument);
}

TEST_CASE("A_q matches the oracle, is scale invariant and decreases in q") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto F = random_filtration(seed, 3, 3);
    Rng rng(seed);
    std::vector<double> w(F->num_points());
    for (double& x : w) x = rng.uniform(0.2, 5.0);
    const auto phi = MOFunction::weighted(w, OrliczProfile::power(1.3));
    std::vector<double> w7(w);
    for (double& x : w7) x *= 7.0;
    const auto phi7 = MOFunction::weighted(w7, OrliczProfile::power(1.3));
    double prev = std::numeric_limits<double>::infinity();
    for (double q : {1.0, 1.5, 2.0, 3.0, 8.0}) {
      const double k = check_aq(*F, phi, q).constant;
      CHECK(k == doctest::Approx(aq_oracle(*F, w, q)).epsilon(1e-10));
      CHECK(k == doctest::Approx(check_aq(*F, phi7, q).constant).epsilon(1e-10));
      CHECK(k <= prev * (1 + 1e-12));
      CHECK(k >= 1.0 - 1e-12);
      prev = k;
    }
  }
}

TEST_CASE("S condition examples") {
  const auto phi = MOFunction::weighted({1, 3}, OrliczProfile::power(1));
  const auto s = check_s_condition(two(), phi, WeightCondition::S);
  CHECK(s.constant == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.pass);
  // φ_1/φ_0 ∈ {1/2, 3/2}: S⁻ needs φ_{n-1} <= K φ_n (K = 2), S⁺ needs φ_n <= K φ_{n-1} (K = 3/2).
  CHECK(check_s_condition(two(), phi, WeightCondition::SMinus).constant ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(check_s_condition(two(), phi, WeightCondition::SPlus).constant ==
        doctest::Approx(1.5).epsilon(1e-12));
  const auto flat = check_s_condition(Filtration::dyadic(4), MOFunction::power(2), WeightCondition::S);
  CHECK(flat.constant == 1.0);
}

TEST_CASE("S condition matches the oracle and is t-free for separable phi") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto F = random_filtration(seed + 50, 4, 3);
    Rng rng(seed);
    std::vector<double> w(F->num_points());
    for (double& x : w) x = rng.uniform(0.2, 5.0);
    const auto phi = MOFunction::weighted(w, OrliczProfile::power_log(0.8));
    const auto a = check_s_condition(*F, phi, WeightCondition::S, LogGrid{1e-2, 1e2, 5});
    const auto b = check_s_condition(*F, phi, WeightCondition::S, LogGrid{1e-4, 1e4, 64});
    CHECK(a.constant == b.constant);
    CHECK(a.constant == doctest::Approx(s_oracle(*F, w)).epsilon(1e-10));
    CHECK(a.constant >= 1.0);
    const double minus = check_s_condition(*F, phi, WeightCondition::SMinus).constant;
    const double plus = check_s_condition(*F, phi, WeightCondition::SPlus).constant;
    CHECK(std::max(minus, plus) == doctest::Approx(a.constant).epsilon(1e-12));
  }
}

TEST_CASE("A_q on a regular filtration implies the S condition") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto F = make_dyadic(1 + static_cast<int>(seed % 5));
    Rng rng(seed);
    std::vector<double> p(F->num_points());
    for (double& x : p) x = rng.uniform(0.5, 1.8);
    const auto phi = MOFunction::variable(p);
    if (check_aq(*F, phi, 2.0, LogGrid{1e-2, 1e2, 16}).pass)
      CHECK(check_s_condition(*F, phi, WeightCondition::S, LogGrid{1e-2, 1e2, 16}).pass);
  }
}

TEST_CASE("non-separable phi is evaluated on the grid") {
  const auto F = Filtration::dyadic(2);
  const auto phi = MOFunction::variable({0.5, 1.0, 1.5, 2.0});
  const auto r = check_aq(F, phi, 2.0, LogGrid{0.1, 10.0, 9});
  CHECK_FALSE(r.t_free);
  CHECK(r.t_grid.size() == 9);
  CHECK(r.constant > 1.0);
  CHECK(std::isfinite(r.constant));
  // At t = 1 every point has φ = 1, so the attaining t is away from 1.
  CHECK(r.t != doctest::Approx(1.0));
}
