#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mhl/filtration.hpp"
#include "mhl/musielak.hpp"

namespace mhl {

/// M (Doob maximal), S (quadratic variation), s (conditional quadratic variation).
enum class OperatorKind { Maximal, Square, ConditionalSquare };

const char* to_string(OperatorKind kind);

/// Levels 0..N of M_n(f), S_n(f) or s_n(f), as point functions.
std::vector<PointFunction> operator_path(OperatorKind kind, const Martingale& f);

/// M_n(f), S_n(f) or s_n(f); n defaults to N (the totals M(f), S(f), s(f)).
PointFunction apply_operator(OperatorKind kind, const Martingale& f,
                             std::optional<int> n = std::nullopt);

/// P: |f_n| <= λ_{n-1};  Q: S_n(f) <= λ_{n-1}.
enum class EnvelopeKind { P, Q };

/// Nondecreasing adapted sequence (λ_n); λ_∞ = λ_N.
struct Envelope {
  AdaptedProcess values;

  PointFunction terminal() const { return values.level(values.horizon()); }
};

/// Pointwise least admissible envelope: λ_{-1} = 0 and
/// λ_n = max(λ_{n-1}, max of g_{n+1} over the P_n cell), g = |f| or S(f).
/// Any admissible sequence dominates it, so ‖λ_∞‖ of this envelope is the
/// exact infimum in the WP/WQ norms (weak_norm is monotone).
Envelope minimal_envelope(EnvelopeKind kind, const Martingale& f);

/// Checks adaptedness, monotonicity, nonnegativity and the domination
/// constraint for a candidate envelope given as point values per level.
bool envelope_admissible(EnvelopeKind kind, const Martingale& f,
                         const std::vector<PointFunction>& lambda, double tol = 1e-12);

enum class HardySpace { WHs, WHS, WHM, WP, WQ };

const char* to_string(HardySpace space);

/// Weak Musielak-Orlicz norm of s(f), S(f), M(f), or λ_∞ of the minimal envelope.
double space_norm(HardySpace space, const MOFunction& phi, const Martingale& f);

/// The point function whose weak norm defines the given space.
PointFunction space_majorant(HardySpace space, const Martingale& f);

struct SublinearOperator {
  std::string name;
  std::function<PointFunction(const Martingale&)> apply;
};

SublinearOperator builtin_operator(OperatorKind kind);

struct SublinearSample {
  Martingale f;
  Martingale g;
  double c;
};

struct SublinearityReport {
  std::string name;
  std::size_t samples = 0;
  /// max of |T(f+g)| - |T(f)| - |T(g)|
  double subadditivity_violation = 0.0;
  /// max of | |T(cf)| - |c||T(f)| |
  double homogeneity_violation = 0.0;
  bool pass = false;
};

/// Random (f, g, c) triples on the given filtration.
std::vector<SublinearSample> sublinear_ensemble(const FiltrationPtr& filtration,
                                                std::uint64_t seed, int count);

/// Pass iff both violations stay within 1e-9.
SublinearityReport check_sublinear(const SublinearOperator& op,
                                   std::span<const SublinearSample> samples);

}  // namespace mhl
