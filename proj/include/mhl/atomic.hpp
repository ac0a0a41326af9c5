#pragma once

#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "mhl/errors.hpp"
#include "mhl/filtration.hpp"
#include "mhl/musielak.hpp"
#include "mhl/operators.hpp"

namespace mhl {

/// Hardy-space atom: a martingale vanishing up to its stopping time, whose
/// s/S/M operator is small on B_ν relative to ‖1_{B_ν}‖_{L^φ}.
struct Atom {
  Martingale a;
  StoppingTime nu;
  OperatorKind kind;
};

/// Which canonical construction produced a decomposition.
enum class DecompositionKind { s, P, Q, S, M };

const char* to_string(DecompositionKind kind);
OperatorKind atom_operator(DecompositionKind kind);
HardySpace matching_space(DecompositionKind kind);

struct DecompositionEntry {
  int k;
  double mu;
  Martingale atom;
  StoppingTime nu;
};

/// Entries (μ^k, a^k, ν^k) for k in [k_min, k_max], μ^k = C̃·2^k·‖1_{B_{ν^k}}‖.
/// Levels outside the range contribute nothing; μ^k = 0 entries carry a ≡ 0.
struct Decomposition {
  DecompositionKind kind = DecompositionKind::s;
  FiltrationPtr filtration;
  double c_tilde = 2.0;
  int k_min = 0;
  int k_max = -1;
  std::vector<DecompositionEntry> entries;
  /// S⁻ constant K and regularity constant R measured for the S/M constructions.
  double weight_constant = 1.0;
  double regularity = 1.0;

  bool empty() const { return entries.empty(); }
  Atom atom(std::size_t i) const {
    return {entries[i].atom, entries[i].nu, atom_operator(kind)};
  }
};

/// ν^k = first n with s_{n+1}(f) > 2^k, μ^k = 2^{k+1}‖1_{B_{ν^k}}‖, and
/// a^k = (f^{ν^{k+1}} - f^{ν^k}) / μ^k. B_{ν^k} = {s(f) > 2^k}.
Decomposition decompose_s(const MOFunction& phi, const Martingale& f);

/// Same scheme driven by the minimal P/Q envelope: ν^k = first n with
/// λ_n > 2^k, μ^k = 3·2^k‖1_{B_{ν^k}}‖. Atoms are of kind M (P) or S (Q).
Decomposition decompose_pq(EnvelopeKind kind, const MOFunction& phi, const Martingale& f);

/// ν^k = stopping_time_regular(γ, 2^k) with γ_n = S_n(f) or M_n(f).
/// C̃ = 2 for kind S and 3 for kind M. Throws PreconditionError when φ has
/// no finite S⁻ constant on the grid.
Decomposition decompose_sm(OperatorKind kind, const MOFunction& phi, const Martingale& f,
                           const LogGrid& grid = {});

/// Dispatch on the construction kind.
Decomposition decompose(DecompositionKind kind, const MOFunction& phi, const Martingale& f,
                        const LogGrid& grid = {});

/// τ_λ(x) = first n such that the P_n cell of x meets {γ_{n+1} > λ}
/// (γ_{N+1} := γ_N). Throws std::invalid_argument when γ is negative or
/// λ <= max γ_0.
StoppingTime stopping_time_regular(const AdaptedProcess& gamma, double lambda);

struct StoppingLemmaCheck {
  /// γ_n(x) <= λ for all n <= τ_λ(x)
  bool bounded_until_stop = false;
  /// {Mγ > λ} ⊆ {τ_λ < ∞}
  bool covers_exceedance = false;
  /// max over the grid of φ({τ_λ < ∞}, t) / φ({Mγ > λ}, t)
  double measure_ratio = 0.0;
};

StoppingLemmaCheck check_stopping_lemma(const MOFunction& phi, const AdaptedProcess& gamma,
                                        double lambda, const StoppingTime& tau,
                                        const LogGrid& grid = {});

struct AtomValidation {
  enum class Failure { None, Vanishing, Size };

  bool pass = true;
  Failure failure = Failure::None;
  // Vanishing witness
  int level = -1;
  std::size_t point = 0;
  // Size witness: ‖op(a)‖_{L^q_φ(B)} (attained at t) against ‖1_B‖^{-1}
  double t = std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  double bound = std::numeric_limits<double>::infinity();
};

/// (i) a_n = 0 on {ν >= n}; (ii) ‖op(a)‖_{L^q_φ(B_ν)} <= ‖1_{B_ν}‖^{-1},
/// read as 0 <= ∞ when B_ν = ∅. Relative slack 1e-9 on (ii).
AtomValidation validate_atom(const MOFunction& phi, const Atom& atom, double q,
                             const LogGrid& grid = {});

/// Σ_{k=m}^{ℓ} μ^k a^k; the full range by default.
Martingale reconstruct(const Decomposition& d,
                       std::optional<std::pair<int, int>> range = std::nullopt);

/// inf{λ > 0 : sup_k φ(B_{ν^k}, 2^k/λ) <= 1} for this decomposition.
double decomposition_norm(const MOFunction& phi, const Decomposition& d,
                          const BisectionOptions& opts = {});

}  // namespace mhl
