#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mhl/atomic.hpp"
#include "mhl/io.hpp"
#include "mhl/operators.hpp"
#include "mhl/weights.hpp"

namespace mhl::verify {

using io::Json;

enum class FiltrationFamily { Dyadic, Random, Fixed };

/// Seeded family of random martingales. Trial i uses depth
/// depth_min + i mod (depth_max - depth_min + 1) and seed derive_seed(seed, {i}).
struct EnsembleSpec {
  std::uint64_t seed = 0;
  int trials = 10;
  int depth_min = 3;
  int depth_max = 3;
  FiltrationFamily family = FiltrationFamily::Dyadic;
  int max_children = 3;
  FiltrationPtr fixed;
  double scale = 1.0;
  bool zero = false;

  Json describe() const;
};

struct Trial {
  int index;
  std::uint64_t seed;
  FiltrationPtr filtration;
  Martingale f;

  int depth() const { return filtration->horizon(); }
};

std::vector<Trial> make_trials(const EnsembleSpec& spec);

/// Builds φ on a given filtration. Accepts the serialized φ formats plus
/// generators: {"kind":"weighted","w":"random","w_range":[lo,hi],"orlicz":{..}}
/// and {"kind":"variable","p":"random","p_range":[lo,hi]}.
class PhiFactory {
 public:
  /// Throws std::invalid_argument on a malformed spec.
  explicit PhiFactory(Json spec);

  MOFunction make(const Filtration& filtration, std::uint64_t seed) const;
  const Json& spec() const { return spec_; }
  /// Declared upper index, known before any filtration is fixed.
  double p_plus() const { return p_plus_; }
  double p_minus() const { return p_minus_; }

 private:
  Json spec_;
  double p_minus_ = 1.0;
  double p_plus_ = 1.0;
};

struct TrialRatio {
  int trial = 0;
  int depth = 0;
  std::uint64_t seed = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  /// Per-trial asserted ceiling on lhs/rhs, if any.
  double bound = std::numeric_limits<double>::infinity();

  /// lhs / rhs; NaN when both vanish.
  double ratio() const;
};

/// Empirical comparison lhs ≈ rhs over an ensemble.
struct EquivalenceReport {
  std::string tag;
  std::string lhs;
  std::string rhs;
  Json ensemble;
  Json phi;
  std::vector<TrialRatio> trials;
  /// min and max of lhs/rhs over non-degenerate trials (NaN if none).
  double c_low = std::numeric_limits<double>::quiet_NaN();
  double c_high = std::numeric_limits<double>::quiet_NaN();
  bool asserted = false;
  bool skipped = false;
  std::string gate;
  bool pass = true;
  Json extra = Json::object();

  /// Recomputes c_low / c_high and pass from the trials. `extra_pass` folds in
  /// checks recorded elsewhere.
  void finalize(bool extra_pass = true);
  Json to_json() const;
};

struct AtomicOptions {
  LogGrid grid;
  /// Exponents for validate_atom; infinity allowed.
  std::vector<double> q = {std::numeric_limits<double>::infinity(), 4.0};
};

/// Canonical decomposition versus its matching space norm per trial. Asserts
/// reconstruction to 1e-9, atom validity at every q, and the forward direction
/// decomposition_norm <= c·space_norm with c = 1 (s, P, Q) or (C_lower K R)^{1/p⁻}
/// (S, M). extra["reverse_by_depth"] holds max space_norm/decomposition_norm per depth.
EquivalenceReport verify_atomic_equivalence(const PhiFactory& phi, DecompositionKind kind,
                                            const EnsembleSpec& ensemble,
                                            const AtomicOptions& options = {});

/// Throws PreconditionError when T fails check_sublinear. Reports the atom
/// support constant and max weak_norm(Tf)/space_norm(source, f).
EquivalenceReport verify_sublinear_boundedness(const SublinearOperator& T, const PhiFactory& phi,
                                               HardySpace source, const EnsembleSpec& ensemble,
                                               const LogGrid& grid = {});

struct InequalityOptions {
  LogGrid grid;
  /// q values tried for the A_∞ gate.
  std::vector<double> aq_q = {1.0, 2.0, 4.0, 8.0, 16.0};
  /// A filtration counts as regular when R <= regularity_cap.
  double regularity_cap = 64.0;
  std::vector<double> lp = {1.0, 2.0};
};

struct InequalityReport {
  /// One entry per inequality; skipped entries name the failed gates.
  std::vector<EquivalenceReport> items;
  /// Hypothesis counts, orthogonality and the S versus s comparison.
  Json summary = Json::object();
  bool pass = true;

  Json to_json() const;
};

/// The weak-space inequality web, the weighted L_p inequalities with weight
/// φ(·,1), orthogonality of increments and the S <= √R̂ s comparison.
InequalityReport verify_martingale_inequalities(const PhiFactory& phi, const EnsembleSpec& ensemble,
                                    const InequalityOptions& options = {});

/// Stopping-time lemma conclusions on random nonnegative adapted processes.
Json verify_stopping_lemma(const PhiFactory& phi, const EnsembleSpec& ensemble,
                           const LogGrid& grid = {});

struct ConvergenceOptions {
  int depth = 12;
  double p = 1.0;
  std::vector<double> truncations = {1.0, 10.0, 100.0};
  std::vector<double> tolerances = {1e-3, 1e-6, 1e-9};
  int sequence_length = 40;
};

/// (a) truncation counterexample, (b) modular/norm co-trending,
/// (c) bounded and dominated convergence, (d) normalization across the ensemble.
Json convergence_experiments(const PhiFactory& phi, const EnsembleSpec& ensemble,
                             const ConvergenceOptions& options = {});

/// (Σ |g|^p w dP)^{1/p}
double weighted_lp_norm(const ProbSpace& space, std::span<const double> g,
                        std::span<const double> w, double p);

/// Finite doubles as numbers, others as null.
Json number(double x);

}  // namespace mhl::verify
