#include <doctest.h>

#include "mhl/operators.hpp"
#include "mhl/rng.hpp"
#include "support.hpp"

using namespace mhl;

namespace {

Martingale depth_one() {
  const auto F = share(Filtration(ProbSpace({0.5, 0.5}), {{{0, 1}}, {{0}, {1}}}));
  return Martingale(AdaptedProcess(F, {{0, 0}, {1, -1}}));
}

}  // namespace

TEST_CASE("operators on the zero martingale") {
  const Martingale z = Martingale::zero(make_dyadic(3));
  for (auto k : {OperatorKind::Maximal, OperatorKind::Square, OperatorKind::ConditionalSquare})
    for (double v : apply_operator(k, z)) CHECK(v == 0.0);
  for (auto h : {HardySpace::WHs, HardySpace::WHS, HardySpace::WHM, HardySpace::WP, HardySpace::WQ})
    CHECK(space_norm(h, MOFunction::power(1), z) == 0.0);
  for (auto e : {EnvelopeKind::P, EnvelopeKind::Q})
    for (double v : minimal_envelope(e, z).terminal()) CHECK(v == 0.0);
}

TEST_CASE("depth-one example") {
  const Martingale f = depth_one();
  for (auto k : {OperatorKind::Maximal, OperatorKind::Square, OperatorKind::ConditionalSquare})
    CHECK(apply_operator(k, f) == std::vector<double>{1, 1});
  const Envelope p = minimal_envelope(EnvelopeKind::P, f);
  CHECK(p.values.at(0, 0) == 1.0);
  CHECK(p.terminal() == std::vector<double>{1, 1});
  for (double p_exp : {0.5, 1.0, 2.0})
    for (auto h : {HardySpace::WHs, HardySpace::WHS, HardySpace::WHM, HardySpace::WP, HardySpace::WQ})
      CHECK(space_norm(h, MOFunction::power(p_exp), f) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(apply_operator(OperatorKind::Square, f, 2), std::invalid_argument);
}

TEST_CASE("operators match brute-force oracles") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto F = random_filtration(seed, 4, 3);
    const Martingale f = random_martingale(F, seed);
    const auto o = oracle::operators(*F, f.process().point_matrix());
    CHECK(oracle::max_abs_diff(apply_operator(OperatorKind::Maximal, f), o.M) <= 1e-12);
    CHECK(oracle::max_abs_diff(apply_operator(OperatorKind::Square, f), o.S) <= 1e-12);
    CHECK(oracle::max_abs_diff(apply_operator(OperatorKind::ConditionalSquare, f), o.s) <= 1e-12);

    // Monotone in n, and s_n is F_{n-1}-measurable.
    for (auto k : {OperatorKind::Maximal, OperatorKind::Square, OperatorKind::ConditionalSquare}) {
      const auto path = operator_path(k, f);
      for (int n = 1; n <= F->horizon(); ++n)
        for (std::size_t i = 0; i < F->num_points(); ++i) CHECK(path[n][i] >= path[n - 1][i]);
    }
    const auto sp = operator_path(OperatorKind::ConditionalSquare, f);
    for (int n = 1; n <= F->horizon(); ++n)
      CHECK(oracle::max_abs_diff(oracle::cond_exp(*F, sp[n], n - 1), sp[n]) <= 1e-12);

    // E M² >= E f_N², E S² = E s² = E f_N².
    double em = 0, ef = 0, eS = 0, es = 0;
    for (std::size_t i = 0; i < F->num_points(); ++i) {
      const double p = F->space().prob(i);
      em += p * o.M[i] * o.M[i];
      ef += p * f.terminal()[i] * f.terminal()[i];
      eS += p * o.S[i] * o.S[i];
      es += p * o.s[i] * o.s[i];
    }
    CHECK(em >= ef - 1e-12);
    CHECK(std::abs(eS - ef) <= 1e-9);
    CHECK(std::abs(es - ef) <= 1e-9);
  }
}

TEST_CASE("conditional square splits across a stopping time") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto F = random_filtration(seed + 100, 4, 3);
    const Martingale f = random_martingale(F, seed);
    Rng rng(seed);
    std::vector<int> tau(F->num_points());
    // Random stopping time: each cell of each level stops with probability 1/3.
    std::vector<int> current(F->num_points(), F->horizon() + 1);
    for (int n = 0; n <= F->horizon(); ++n)
      for (const Cell& cell : F->partition(n)) {
        if (current[cell.front()] <= F->horizon()) continue;
        if (rng.uniform() < 1.0 / 3.0)
          for (std::size_t pt : cell) current[pt] = n;
      }
    tau = current;
    const StoppingTime nu(F, tau);
    const Martingale g = stopped_martingale(f, nu);
    const auto s_f = apply_operator(OperatorKind::ConditionalSquare, f);
    const auto s_g = apply_operator(OperatorKind::ConditionalSquare, g);
    const auto s_r = apply_operator(OperatorKind::ConditionalSquare, f - g);
    for (std::size_t i = 0; i < s_f.size(); ++i)
      CHECK(s_g[i] * s_g[i] + s_r[i] * s_r[i] == doctest::Approx(s_f[i] * s_f[i]).epsilon(1e-12));
  }
}

TEST_CASE("minimal envelopes are admissible and minimal") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto F = random_filtration(seed, 4, 3);
    const Martingale f = random_martingale(F, seed);
    for (auto kind : {EnvelopeKind::P, EnvelopeKind::Q}) {
      const Envelope env = minimal_envelope(kind, f);
      const auto lam = env.values.point_matrix();
      REQUIRE(envelope_admissible(kind, f, lam));
      // Brute-force oracle: λ_n = max(λ_{n-1}, max of g_{n+1} over the P_n cell).
      for (int n = 0; n <= F->horizon(); ++n) {
        for (std::size_t i = 0; i < F->num_points(); ++i) {
          double expect = n > 0 ? lam[n - 1][i] : 0.0;
          if (n < F->horizon())
            for (std::size_t j : oracle::cell_containing(*F, n, i)) {
              double g = std::abs(f.at(n + 1, j));
              if (kind == EnvelopeKind::Q) g = apply_operator(OperatorKind::Square, f, n + 1)[j];
              expect = std::max(expect, g);
            }
          CHECK(lam[n][i] == doctest::Approx(expect).epsilon(1e-14));
        }
      }
      // Every cell value is pinned either by g_{n+1}, by λ_{n-1} or by 0, so
      // lowering any single cell breaks admissibility.
      for (int n = 0; n <= F->horizon(); ++n)
        for (const Cell& cell : F->partition(n)) {
          auto lower = lam;
          for (std::size_t pt : cell) lower[n][pt] -= 1e-6;
          CHECK_FALSE(envelope_admissible(kind, f, lower));
        }
      // Raising values keeps admissibility and never lowers the weak norm.
      const auto phi = MOFunction::power(0.8);
      const double base = space_norm(kind == EnvelopeKind::P ? HardySpace::WP : HardySpace::WQ, phi, f);
      Rng rng(seed + 5);
      for (int trial = 0; trial < 50; ++trial) {
        auto up = lam;
        for (int n = 0; n <= F->horizon(); ++n)
          for (const Cell& cell : F->partition(n)) {
            const double bump = rng.uniform(0.0, 0.5);
            for (std::size_t pt : cell) up[n][pt] += bump;
          }
        for (int n = 1; n <= F->horizon(); ++n)
          for (std::size_t i = 0; i < F->num_points(); ++i) up[n][i] = std::max(up[n][i], up[n - 1][i]);
        REQUIRE(envelope_admissible(kind, f, up));
        CHECK(weak_norm(phi, F->space(), up.back()) >= base - 1e-12);
      }
    }
  }
}

TEST_CASE("space norm ordering with constant one") {
  const auto phi = MOFunction::power(0.8);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto F = random_filtration(seed, 4, 3);
    const Martingale f = random_martingale(F, seed);
    CHECK(space_norm(HardySpace::WHM, phi, f) <= space_norm(HardySpace::WP, phi, f) * (1 + 1e-9));
    CHECK(space_norm(HardySpace::WHS, phi, f) <= space_norm(HardySpace::WQ, phi, f) * (1 + 1e-9));
  }
}

TEST_CASE("sublinearity") {
  const auto samples = sublinear_ensemble(make_dyadic(4), 9, 30);
  CHECK(samples.size() == 30);
  for (auto k : {OperatorKind::Maximal, OperatorKind::Square, OperatorKind::ConditionalSquare}) {
    const auto r = check_sublinear(builtin_operator(k), samples);
    CHECK(r.pass);
    CHECK(r.samples == 30);
  }
  const SublinearOperator square{"f_N^2", [](const Martingale& f) {
                                   auto g = f.terminal();
                                   for (double& x : g) x *= x;
                                   return g;
                                 }};
  const auto bad = check_sublinear(square, samples);
  CHECK_FALSE(bad.pass);
  CHECK(bad.homogeneity_violation > 1e-9);
}
