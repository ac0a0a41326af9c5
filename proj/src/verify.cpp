#include "mhl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "mhl/rng.hpp"

namespace mhl::verify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::pair<double, double> range_of(const Json& j, const char* key, std::pair<double, double> dflt) {
  if (!j.contains(key)) return dflt;
  const auto v = j.at(key).get<std::vector<double>>();
  require(v.size() == 2 && v[0] > 0.0 && v[0] <= v[1], std::string(key) + " must be [lo, hi], 0<lo<=hi");
  return {v[0], v[1]};
}

std::vector<double> draw(std::size_t n, std::uint64_t seed, std::pair<double, double> r) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = rng.uniform(r.first, r.second);
  return out;
}

std::string join_gates(const std::vector<std::string>& failed) {
  std::string s;
  for (const auto& g : failed) s += (s.empty() ? "" : ", ") + g;
  return s;
}

Json q_json(double q) { return std::isinf(q) ? Json("inf") : Json(q); }

}  // namespace

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json EnsembleSpec::describe() const {
  const char* fam = family == FiltrationFamily::Dyadic   ? "dyadic"
                    : family == FiltrationFamily::Random ? "random"
                                                         : "fixed";
  Json j = {{"seed", seed}, {"trials", trials}, {"filtration", fam}};
  if (family != FiltrationFamily::Fixed) {
    j["depth_min"] = depth_min;
    j["depth_max"] = depth_max;
  }
  if (family == FiltrationFamily::Random) j["max_children"] = max_children;
  j["scale"] = scale;
  j["zero"] = zero;
  return j;
}

std::vector<Trial> make_trials(const EnsembleSpec& spec) {
  require(spec.trials >= 0, "trial count must be nonnegative");
  require(spec.family == FiltrationFamily::Fixed ||
              (spec.depth_min >= 1 && spec.depth_min <= spec.depth_max),
          "depth range must satisfy 1 <= depth_min <= depth_max");
  require(spec.family != FiltrationFamily::Fixed || spec.fixed, "fixed ensemble needs a filtration");
  std::vector<Trial> out;
  std::map<int, FiltrationPtr> dyadic;
  for (int i = 0; i < spec.trials; ++i) {
    const std::uint64_t seed = derive_seed(spec.seed, {static_cast<std::uint64_t>(i)});
    const int depth = spec.depth_min + i % (spec.depth_max - spec.depth_min + 1);
    FiltrationPtr F;
    switch (spec.family) {
      case FiltrationFamily::Dyadic:
        if (!dyadic.count(depth)) dyadic[depth] = make_dyadic(depth);
        F = dyadic[depth];
        break;
      case FiltrationFamily::Random:
        F = random_filtration(derive_seed(seed, {1}), depth, spec.max_children);
        break;
      case FiltrationFamily::Fixed:
        F = spec.fixed;
        break;
    }
    Martingale f = spec.zero ? Martingale::zero(F) : random_martingale(F, seed, spec.scale);
    out.push_back({i, seed, F, std::move(f)});
  }
  return out;
}

PhiFactory::PhiFactory(Json spec) : spec_(std::move(spec)) {
  require(spec_.is_object() && spec_.contains("kind"), "phi spec must be an object with a kind");
  const std::string kind = spec_.at("kind").get<std::string>();
  const bool random_w = kind == "weighted" && spec_.contains("w") && spec_.at("w").is_string();
  const bool random_p = kind == "variable" && spec_.contains("p") && spec_.at("p").is_string();
  if (random_w) {
    require(spec_.at("w") == "random", "w must be a list or \"random\"");
    for (const auto& [key, _] : spec_.items())
      require(key == "kind" || key == "w" || key == "w_range" || key == "orlicz",
              "unknown phi key '" + key + "'");
    range_of(spec_, "w_range", {0.5, 2.0});
    const MOFunction probe = io::phi_from_json({{"kind", "orlicz"}, {"orlicz", spec_.at("orlicz")}});
    p_minus_ = probe.p_minus();
    p_plus_ = probe.p_plus();
  } else if (random_p) {
    require(spec_.at("p") == "random", "p must be a list or \"random\"");
    for (const auto& [key, _] : spec_.items())
      require(key == "kind" || key == "p" || key == "p_range", "unknown phi key '" + key + "'");
    std::tie(p_minus_, p_plus_) = range_of(spec_, "p_range", {0.5, 1.5});
  } else {
    const MOFunction probe = io::phi_from_json(spec_);
    p_minus_ = probe.p_minus();
    p_plus_ = probe.p_plus();
  }
}

MOFunction PhiFactory::make(const Filtration& filtration, std::uint64_t seed) const {
  const std::string kind = spec_.at("kind").get<std::string>();
  const std::size_t n = filtration.num_points();
  if (kind == "weighted" && spec_.at("w").is_string()) {
    auto w = draw(n, derive_seed(seed, {0x77}), range_of(spec_, "w_range", {0.5, 2.0}));
    Json j = {{"kind", "weighted"}, {"w", w}, {"orlicz", spec_.at("orlicz")}};
    return io::phi_from_json(j);
  }
  if (kind == "variable" && spec_.at("p").is_string()) {
    // Pin the declared extremes so every draw has the same indices.
    auto p = draw(n, derive_seed(seed, {0x70}), range_of(spec_, "p_range", {0.5, 1.5}));
    p.front() = p_minus_;
    if (n > 1) p.back() = p_plus_;
    return MOFunction::variable(std::move(p));
  }
  MOFunction phi = io::phi_from_json(spec_);
  phi.require_points(n);
  return phi;
}

double TrialRatio::ratio() const {
  if (lhs == 0.0 && rhs == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return rhs == 0.0 ? kInf : lhs / rhs;
}

void EquivalenceReport::finalize(bool extra_pass) {
  if (skipped) {
    pass = true;
    return;
  }
  c_low = kInf;
  c_high = 0.0;
  bool any = false, within = true;
  for (const auto& t : trials) {
    const double r = t.ratio();
    if (std::isnan(r)) continue;
    any = true;
    c_low = std::min(c_low, r);
    c_high = std::max(c_high, r);
    if (r > t.bound * (1.0 + 1e-9)) within = false;
  }
  if (!any) {
    c_low = c_high = std::numeric_limits<double>::quiet_NaN();
    pass = extra_pass;
    return;
  }
  const bool finite = std::isfinite(c_high) && c_low > 0.0;
  pass = finite && within && extra_pass;
}

Json EquivalenceReport::to_json() const {
  Json j = {{"tag", tag}, {"lhs", lhs}, {"rhs", rhs}, {"ensemble", ensemble}, {"phi", phi},
            {"trials", trials.size()}, {"c_low", number(c_low)}, {"c_high", number(c_high)},
            {"asserted", asserted}, {"skipped", skipped}};
  if (skipped) j["gate"] = gate;
  j["pass"] = pass;
  if (!extra.empty()) j["extra"] = extra;
  return j;
}

EquivalenceReport verify_atomic_equivalence(const PhiFactory& factory, DecompositionKind kind,
                                            const EnsembleSpec& ensemble,
                                            const AtomicOptions& options) {
  EquivalenceReport rep;
  rep.tag = std::string("atomic:") + to_string(kind);
  rep.lhs = "decomposition_norm";
  rep.rhs = to_string(matching_space(kind));
  rep.ensemble = ensemble.describe();
  rep.phi = factory.spec();
  rep.asserted = true;
  const bool regular_kind = kind == DecompositionKind::S || kind == DecompositionKind::M;

  double max_recon = 0.0;
  std::size_t atoms = 0;
  std::map<std::string, std::size_t> failures;
  for (double q : options.q) failures[q_json(q).dump()] = 0;
  std::map<int, double> reverse;
  Json first_failure = nullptr;

  for (const Trial& t : make_trials(ensemble)) {
    const MOFunction phi = factory.make(*t.filtration, t.seed);
    const Decomposition d = decompose(kind, phi, t.f, options.grid);
    const Martingale back = reconstruct(d);
    for (int n = 0; n <= t.f.horizon(); ++n)
      for (std::size_t i = 0; i < t.filtration->num_points(); ++i)
        max_recon = std::max(max_recon, std::abs(back.at(n, i) - t.f.at(n, i)));
    for (std::size_t e = 0; e < d.entries.size(); ++e) {
      ++atoms;
      for (double q : options.q) {
        const AtomValidation v = validate_atom(phi, d.atom(e), q, options.grid);
        if (v.pass) continue;
        ++failures[q_json(q).dump()];
        if (first_failure.is_null())
          first_failure = {{"trial", t.index}, {"k", d.entries[e].k}, {"q", q_json(q)},
                           {"failure", v.failure == AtomValidation::Failure::Size ? "size" : "vanishing"},
                           {"value", number(v.value)}, {"bound", number(v.bound)}};
      }
    }
    TrialRatio r{t.index, t.depth(), t.seed, decomposition_norm(phi, d),
                 space_norm(matching_space(kind), phi, t.f), 1.0};
    if (regular_kind)
      r.bound = std::pow(phi.indices().c_lower * d.weight_constant * d.regularity,
                         1.0 / phi.p_minus());
    if (r.lhs > 0.0) {
      double& m = reverse[t.depth()];
      m = std::max(m, r.rhs / r.lhs);
    }
    rep.trials.push_back(r);
  }

  bool atoms_ok = true;
  Json fails = Json::object();
  for (const auto& [q, c] : failures) {
    fails[q] = c;
    atoms_ok = atoms_ok && c == 0;
  }
  Json rev = Json::object();
  for (const auto& [depth, v] : reverse) rev[std::to_string(depth)] = number(v);
  const bool recon_ok = max_recon <= 1e-9;
  rep.extra = {{"reconstruction_max_error", max_recon},
               {"reconstruction_pass", recon_ok},
               {"atoms_checked", atoms},
               {"atom_failures", fails},
               {"reverse_by_depth", rev}};
  if (!first_failure.is_null()) rep.extra["first_atom_failure"] = first_failure;
  rep.finalize(recon_ok && atoms_ok);
  return rep;
}

namespace {

DecompositionKind kind_for(HardySpace source) {
  switch (source) {
    case HardySpace::WHs: return DecompositionKind::s;
    case HardySpace::WHS: return DecompositionKind::S;
    case HardySpace::WHM: return DecompositionKind::M;
    case HardySpace::WP: return DecompositionKind::P;
    case HardySpace::WQ: return DecompositionKind::Q;
  }
  return DecompositionKind::s;
}

}  // namespace

EquivalenceReport verify_sublinear_boundedness(const SublinearOperator& T, const PhiFactory& factory,
                                               HardySpace source, const EnsembleSpec& ensemble,
                                               const LogGrid& grid) {
  const auto trials = make_trials(ensemble);
  const FiltrationPtr probe = trials.empty() ? make_dyadic(3) : trials.front().filtration;
  const auto samples = sublinear_ensemble(probe, derive_seed(ensemble.seed, {0x5b}), 20);
  const SublinearityReport sub = check_sublinear(T, samples);
  if (!sub.pass) throw PreconditionError("operator '" + T.name + "' is not sublinear");

  EquivalenceReport rep;
  rep.tag = "sublinear:" + T.name + ":" + to_string(source);
  rep.lhs = "weak_norm(" + T.name + " f)";
  rep.rhs = to_string(source);
  rep.ensemble = ensemble.describe();
  rep.phi = factory.spec();

  double c_sup = 0.0;
  for (const Trial& t : trials) {
    const MOFunction phi = factory.make(*t.filtration, t.seed);
    const ProbSpace& space = t.filtration->space();
    const Decomposition d = decompose(kind_for(source), phi, t.f, grid);
    const std::vector<double> ts = phi.separable() ? std::vector<double>{1.0} : grid.values();
    for (std::size_t e = 0; e < d.entries.size(); ++e) {
      const PointFunction ta = T.apply(d.entries[e].atom);
      const PointSet supp = PointSet::where(ta.size(), [&](std::size_t i) { return ta[i] != 0.0; });
      const PointSet b = d.entries[e].nu.support();
      for (double s : ts) {
        const double num = phi_measure(phi, space, supp, s);
        if (num == 0.0) continue;
        const double den = phi_measure(phi, space, b, s);
        c_sup = std::max(c_sup, den > 0.0 ? num / den : kInf);
      }
    }
    rep.trials.push_back({t.index, t.depth(), t.seed, weak_norm(phi, space, T.apply(t.f)),
                          space_norm(source, phi, t.f)});
  }
  rep.extra = {{"support_constant", number(c_sup)},
               {"subadditivity_violation", sub.subadditivity_violation},
               {"homogeneity_violation", sub.homogeneity_violation}};
  rep.finalize(std::isfinite(c_sup));
  return rep;
}

double weighted_lp_norm(const ProbSpace& space, std::span<const double> g, std::span<const double> w,
                        double p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) sum += std::pow(std::abs(g[i]), p) * w[i] * space.prob(i);
  return std::pow(sum, 1.0 / p);
}

namespace {

struct Hypotheses {
  bool a_inf = false;
  bool s = false;
  bool s_minus = false;
  bool s_plus = false;
  bool p_lt_2 = false;
  bool regular = false;
};

struct Item {
  std::string tag;
  std::string lhs;
  std::string rhs;
  std::vector<std::string> gates;
  bool asserted = false;
  double bound = kInf;
};

bool gate_holds(const Hypotheses& h, const std::string& g) {
  if (g == "A_inf") return h.a_inf;
  if (g == "S") return h.s;
  if (g == "S-") return h.s_minus;
  if (g == "S+") return h.s_plus;
  if (g == "p+<2") return h.p_lt_2;
  if (g == "regular") return h.regular;
  throw std::logic_error("unknown gate " + g);
}

}  // namespace

Json InequalityReport::to_json() const {
  Json j = summary;
  Json arr = Json::array();
  for (const auto& it : items) arr.push_back(it.to_json());
  j["items"] = arr;
  j["pass"] = pass;
  return j;
}

InequalityReport verify_martingale_inequalities(const PhiFactory& factory, const EnsembleSpec& ensemble,
                                    const InequalityOptions& options) {
  for (double q : options.aq_q) require(q >= 1.0, "A_q exponent must be >= 1");
  const std::vector<HardySpace> spaces = {HardySpace::WHs, HardySpace::WHS, HardySpace::WHM,
                                          HardySpace::WP, HardySpace::WQ};
  const char* names[] = {"WHs", "WHS", "WHM", "WP", "WQ"};
  std::vector<Item> items = {
      {"mi1", "WHS", "WHs", {"S+", "p+<2"}},
      {"mi2", "WHM", "WHs", {"A_inf", "S", "p+<2"}},
      {"mi3:P", "WHM", "WP", {}, true, 1.0},
      {"mi3:Q", "WHS", "WQ", {}, true, 1.0},
      {"mi4:S/P", "WHS", "WP", {"A_inf", "S"}},
      {"mi4:s/P", "WHs", "WP", {"A_inf", "S"}},
      {"mi4:M/Q", "WHM", "WQ", {"A_inf", "S"}},
      {"mi5", "WHs", "WQ", {"S-"}},
      {"mi6", "WP", "WQ", {"A_inf", "S", "p+<2"}},
  };
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b)
      items.push_back({std::string("coincide:") + names[a] + "/" + names[b], names[a], names[b],
                       {"regular", "A_inf"}});
  struct LpItem {
    std::string tag;
    OperatorKind lhs, rhs;
    std::vector<std::string> gates;
    double p_lo, p_hi;
  };
  const std::vector<LpItem> lp_items = {
      {"bl1", OperatorKind::Square, OperatorKind::Maximal, {"A_inf", "S"}, 1.0, kInf},
      {"bl2", OperatorKind::ConditionalSquare, OperatorKind::Square, {"S-"}, 2.0, kInf},
      {"bl3", OperatorKind::Square, OperatorKind::ConditionalSquare, {"S+"}, 0.0, 2.0},
      {"bl4", OperatorKind::Maximal, OperatorKind::ConditionalSquare, {"A_inf", "S"}, 0.0, 2.0},
  };
  std::vector<Item> lp_reports;
  for (const auto& li : lp_items)
    for (double p : options.lp)
      if (p >= li.p_lo && p <= li.p_hi) {
        Json pj = p;
        lp_reports.push_back({li.tag + ":p=" + pj.dump(), to_string(li.lhs), to_string(li.rhs),
                              li.gates});
      }

  std::vector<EquivalenceReport> reports(items.size() + lp_reports.size());
  std::vector<std::size_t> gated_out(reports.size(), 0);
  std::vector<std::map<std::string, std::size_t>> gate_failures(reports.size());
  double orth_max = 0.0;
  double r_hat = 0.0;
  double max_aq = 0.0, max_s = 0.0, max_r = 0.0;
  std::size_t counts[6] = {0, 0, 0, 0, 0, 0};
  const auto trials = make_trials(ensemble);

  for (const Trial& t : trials) {
    const MOFunction phi = factory.make(*t.filtration, t.seed);
    const Filtration& F = *t.filtration;
    const ProbSpace& space = F.space();
    Hypotheses h;
    for (double q : options.aq_q) {
      const WeightReport w = check_aq(F, phi, q, options.grid);
      if (w.pass) {
        h.a_inf = true;
        max_aq = std::max(max_aq, w.constant);
        break;
      }
    }
    const WeightReport ws = check_s_condition(F, phi, WeightCondition::S, options.grid);
    h.s = ws.pass;
    max_s = std::max(max_s, ws.constant);
    h.s_minus = check_s_condition(F, phi, WeightCondition::SMinus, options.grid).pass;
    h.s_plus = check_s_condition(F, phi, WeightCondition::SPlus, options.grid).pass;
    h.p_lt_2 = phi.p_plus() < 2.0;
    const double R = regularity_constant(F);
    max_r = std::max(max_r, R);
    h.regular = R <= options.regularity_cap;
    const bool flags[6] = {h.a_inf, h.s, h.s_minus, h.s_plus, h.p_lt_2, h.regular};
    for (int i = 0; i < 6; ++i) counts[i] += flags[i];

    std::map<std::string, double> norm;
    for (int a = 0; a < 5; ++a) norm[names[a]] = space_norm(spaces[a], phi, t.f);
    auto record = [&](std::size_t idx, const std::vector<std::string>& gates, double lhs,
                      double rhs, double bound) {
      bool ok = true;
      for (const auto& g : gates)
        if (!gate_holds(h, g)) {
          ok = false;
          ++gate_failures[idx][g];
        }
      if (!ok) {
        ++gated_out[idx];
        return;
      }
      reports[idx].trials.push_back({t.index, t.depth(), t.seed, lhs, rhs, bound});
    };
    for (std::size_t k = 0; k < items.size(); ++k)
      record(k, items[k].gates, norm[items[k].lhs], norm[items[k].rhs], items[k].bound);

    PointFunction w(F.num_points());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = phi(i, 1.0);
    const PointFunction M = apply_operator(OperatorKind::Maximal, t.f);
    const PointFunction S = apply_operator(OperatorKind::Square, t.f);
    const PointFunction s = apply_operator(OperatorKind::ConditionalSquare, t.f);
    auto op = [&](const std::string& n) -> const PointFunction& {
      return n == "M" ? M : n == "S" ? S : s;
    };
    for (std::size_t k = 0; k < lp_reports.size(); ++k) {
      const std::string& tag = lp_reports[k].tag;
      const double p = std::stod(tag.substr(tag.find("p=") + 2));
      record(items.size() + k, lp_reports[k].gates,
             weighted_lp_norm(space, op(lp_reports[k].lhs), w, p),
             weighted_lp_norm(space, op(lp_reports[k].rhs), w, p), kInf);
    }

    // Orthogonality of increments: E S² = E s² = E f_N².
    PointFunction s2(F.num_points()), S2(F.num_points()), f2(F.num_points());
    const PointFunction fN = t.f.terminal();
    for (std::size_t i = 0; i < f2.size(); ++i) {
      s2[i] = s[i] * s[i];
      S2[i] = S[i] * S[i];
      f2[i] = fN[i] * fN[i];
    }
    const double ef = space.integral(f2);
    const double scale = std::max(1.0, ef);
    orth_max = std::max({orth_max, std::abs(space.integral(S2) - ef) / scale,
                         std::abs(space.integral(s2) - ef) / scale});
    for (std::size_t i = 0; i < S.size(); ++i)
      if (s[i] > 0.0)
        r_hat = std::max(r_hat, (S[i] / s[i]) * (S[i] / s[i]));
      else if (S[i] > 1e-12)
        r_hat = kInf;
  }

  InequalityReport out;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const Item& it = k < items.size() ? items[k] : lp_reports[k - items.size()];
    EquivalenceReport& rep = reports[k];
    rep.tag = it.tag;
    rep.lhs = it.lhs;
    rep.rhs = it.rhs;
    rep.ensemble = ensemble.describe();
    rep.phi = factory.spec();
    rep.asserted = it.asserted;
    if (!trials.empty() && rep.trials.empty()) {
      rep.skipped = true;
      std::vector<std::string> failed;
      for (const auto& [g, _] : gate_failures[k]) failed.push_back(g);
      rep.gate = join_gates(failed);
    }
    rep.finalize();
    rep.extra = {{"gates", it.gates}, {"gated_out", gated_out[k]}};
    out.pass = out.pass && rep.pass;
    out.items.push_back(std::move(rep));
  }

  const bool orth_ok = orth_max <= 1e-9;
  const bool rhat_ok = std::isfinite(r_hat);
  out.pass = out.pass && orth_ok && rhat_ok;
  const char* hyp_names[] = {"A_inf", "S", "S-", "S+", "p+<2", "regular"};
  Json hyp = Json::object();
  for (int i = 0; i < 6; ++i) hyp[hyp_names[i]] = counts[i];
  out.summary = {
      {"hypotheses",
       {{"trials", trials.size()},
        {"trials_satisfying", hyp},
        {"max_aq_constant", max_aq},
        {"max_s_constant", max_s},
        {"max_regularity", max_r},
        {"regularity_cap", options.regularity_cap},
        {"t_grid", {{"lo", options.grid.lo}, {"hi", options.grid.hi}, {"points", options.grid.points}}}}},
      {"orthogonality", {{"max_relative_error", orth_max}, {"pass", orth_ok}}},
      {"square_vs_conditional", {{"r_hat", number(r_hat)}, {"pass", rhat_ok}}}};
  return out;
}

Json verify_stopping_lemma(const PhiFactory& factory, const EnsembleSpec& ensemble,
                           const LogGrid& grid) {
  std::size_t cases = 0, fail_a = 0, fail_b = 0, fail_c = 0, fail_d = 0;
  double worst_c = 0.0;
  for (const Trial& t : make_trials(ensemble)) {
    const Filtration& F = *t.filtration;
    const MOFunction phi = factory.make(F, t.seed);
    const double K = check_s_condition(F, phi, WeightCondition::SMinus, grid).constant;
    const double R = regularity_constant(F);
    Rng rng(derive_seed(t.seed, {0x6c}));
    const AdaptedProcess gamma =
        random_adapted(t.filtration, derive_seed(t.seed, {0x67}), ensemble.scale, rng.uniform(0.0, 0.1));
    double g0 = 0.0, gmax = 0.0;
    for (double v : gamma.cells(0)) g0 = std::max(g0, v);
    for (int n = 0; n <= F.horizon(); ++n)
      for (double v : gamma.cells(n)) gmax = std::max(gmax, v);
    std::vector<double> lambdas;
    for (int j = 0; j < 6; ++j) lambdas.push_back(g0 + (gmax - g0) * (j + 0.5) / 6.0 + 1e-12);
    std::vector<StoppingTime> taus;
    for (double lambda : lambdas) {
      StoppingTime tau = stopping_time_regular(gamma, lambda);
      const StoppingLemmaCheck c = check_stopping_lemma(phi, gamma, lambda, tau, grid);
      ++cases;
      fail_a += !c.bounded_until_stop;
      fail_b += !c.covers_exceedance;
      const double ratio = c.measure_ratio / (K * R);
      worst_c = std::max(worst_c, ratio);
      fail_c += !(c.measure_ratio <= K * R * (1.0 + 1e-12));
      taus.push_back(std::move(tau));
    }
    for (std::size_t j = 1; j < taus.size(); ++j)
      for (std::size_t i = 0; i < F.num_points(); ++i)
        if (taus[j - 1].at(i) > taus[j].at(i)) {
          ++fail_d;
          break;
        }
  }
  const bool pass = fail_a == 0 && fail_b == 0 && fail_c == 0 && fail_d == 0;
  return {{"cases", cases},
          {"failures", {{"a", fail_a}, {"b", fail_b}, {"c", fail_c}, {"d", fail_d}}},
          {"max_ratio_over_KR", worst_c},
          {"pass", pass}};
}

namespace {

/// Records a sequence of values and tests eventual descent below each tolerance.
Json sequence_report(const std::vector<double>& v, const std::vector<double>& tolerances) {
  Json below = Json::object();
  bool ok = true;
  for (double tol : tolerances) {
    // First index from which every later value stays below tol.
    std::ptrdiff_t from = -1;
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(v.size()) - 1; i >= 0; --i) {
      if (v[i] >= tol) break;
      from = i;
    }
    Json tj = tol;
    below[tj.dump()] = from < 0 ? Json(nullptr) : Json(from);
    ok = ok && from >= 0;
  }
  return {{"values", v}, {"eventually_below", below}, {"pass", ok}};
}

bool nonincreasing(const std::vector<double>& v, double slack = 1e-12) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1] * (1.0 + slack) + slack) return false;
  return true;
}

}  // namespace

Json convergence_experiments(const PhiFactory& factory, const EnsembleSpec& ensemble,
                             const ConvergenceOptions& opt) {
  require(opt.depth >= 1 && opt.depth <= 20, "convergence depth must be in [1, 20]");
  require(opt.p > 0.0, "convergence exponent must be positive");
  Json out = Json::object();
  bool pass = true;

  // (a) f(x) = x^{-1/p} sampled at right endpoints of the depth-D dyadic grid.
  {
    const FiltrationPtr F = make_dyadic(opt.depth);
    const MOFunction phi = MOFunction::power(opt.p);
    const std::size_t n = F->num_points();
    PointFunction f(n);
    for (std::size_t i = 0; i < n; ++i)
      f[i] = std::pow(static_cast<double>(i + 1) / static_cast<double>(n), -1.0 / opt.p);
    const double full = weak_norm(phi, F->space(), f);
    bool ok = std::abs(full - 1.0) <= 1e-9;
    const double cap = std::pow(2.0, opt.depth / opt.p);
    Json tr = Json::array();
    for (double level : opt.truncations) {
      PointFunction g(n);
      for (std::size_t i = 0; i < n; ++i) g[i] = f[i] > level ? f[i] : 0.0;
      const double v = weak_norm(phi, F->space(), g);
      const bool applies = level < cap;
      const bool item_ok = !applies || std::abs(v - 1.0) <= 1e-9;
      ok = ok && item_ok;
      tr.push_back({{"n", level}, {"weak_norm", v}, {"applies", applies}, {"pass", item_ok}});
    }
    out["counterexample"] = {{"depth", opt.depth}, {"p", opt.p}, {"weak_norm", full},
                             {"truncations", tr}, {"pass", ok}};
    pass = pass && ok;
  }

  const auto trials = make_trials(ensemble);

  // (b) weak norm and modular fall together along f/n and shrinking supports.
  {
    bool ok = true;
    Json seqs = Json::array();
    for (const Trial& t : trials) {
      if (t.index >= 5) break;
      const MOFunction phi = factory.make(*t.filtration, t.seed);
      const ProbSpace& space = t.filtration->space();
      const PointFunction f = t.f.terminal();
      std::vector<double> norm_a, rho_a, norm_b, rho_b;
      for (int k = 1; k <= opt.sequence_length; ++k) {
        PointFunction h(f);
        for (double& x : h) x /= std::pow(2.0, k - 1);
        norm_a.push_back(weak_norm(phi, space, h));
        rho_a.push_back(modular_rho(phi, space, h));
      }
      const std::size_t n = f.size();
      for (std::size_t keep = n;; keep /= 2) {
        PointFunction h(n, 0.0);
        for (std::size_t i = 0; i < keep; ++i) h[i] = f[i];
        norm_b.push_back(weak_norm(phi, space, h));
        rho_b.push_back(modular_rho(phi, space, h));
        if (keep == 0) break;
      }
      const bool co = nonincreasing(norm_a) && nonincreasing(rho_a) && nonincreasing(norm_b) &&
                      nonincreasing(rho_b) && norm_b.back() == 0.0 && rho_b.back() == 0.0;
      const Json a = sequence_report(norm_a, opt.tolerances);
      const Json b = sequence_report(rho_a, opt.tolerances);
      const bool item = co && a.at("pass").get<bool>() && b.at("pass").get<bool>();
      ok = ok && item;
      seqs.push_back({{"trial", t.index}, {"scaled_norm", a}, {"scaled_modular", b},
                      {"support_norm", norm_b}, {"support_modular", rho_b}, {"co_trending", co},
                      {"pass", item}});
    }
    out["modular"] = {{"sequences", seqs}, {"pass", ok}};
    pass = pass && ok;
  }

  // (c) bounded and dominated sequences on a fixed finite space.
  {
    bool ok = true;
    Json seqs = Json::array();
    for (const Trial& t : trials) {
      if (t.index >= 5) break;
      const MOFunction phi = factory.make(*t.filtration, t.seed);
      const ProbSpace& space = t.filtration->space();
      const PointFunction h = t.f.terminal();
      Rng rng(derive_seed(t.seed, {0xdc}));
      PointFunction g(h.size());
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::abs(h[i]) + rng.uniform(0.5, 1.5);
      std::vector<double> bounded, dominated;
      for (int k = 1; k <= opt.sequence_length; ++k) {
        PointFunction d1(h.size()), d2(h.size());
        const double shrink = std::ldexp(1.0, -k);
        for (std::size_t i = 0; i < h.size(); ++i) {
          // h_k = h·(1 + (-1)^k / 2^k) stays bounded by 2|h|.
          d1[i] = h[i] * ((k % 2 ? -1.0 : 1.0) * shrink);
          // h_k = h + g·u_k·2^{-k}, |h_k| <= |h| + g.
          d2[i] = g[i] * rng.uniform(-1.0, 1.0) * shrink;
        }
        bounded.push_back(weak_norm(phi, space, d1));
        dominated.push_back(weak_norm(phi, space, d2));
      }
      const Json a = sequence_report(bounded, opt.tolerances);
      const Json b = sequence_report(dominated, opt.tolerances);
      const bool item = a.at("pass").get<bool>() && b.at("pass").get<bool>();
      ok = ok && item;
      seqs.push_back({{"trial", t.index}, {"bounded", a}, {"dominated", b}, {"pass", item}});
    }
    out["dominated"] = {{"sequences", seqs}, {"pass", ok}};
    pass = pass && ok;
  }

  // (d) normalization: sup_α φ({|f| > α}, α/‖f‖) = 1.
  {
    double worst = 0.0;
    std::size_t checked = 0;
    for (const Trial& t : trials) {
      const MOFunction phi = factory.make(*t.filtration, t.seed);
      const ProbSpace& space = t.filtration->space();
      const PointFunction f = t.f.terminal();
      const double nrm = weak_norm(phi, space, f);
      if (nrm == 0.0) continue;
      ++checked;
      worst = std::max(worst, std::abs(weak_constraint(phi, space, f, nrm) - 1.0));
    }
    const bool ok = worst <= 1e-6;
    out["normalization"] = {{"checked", checked}, {"max_deviation", worst}, {"pass", ok}};
    pass = pass && ok;
  }
  out["pass"] = pass;
  return out;
}

}  // namespace mhl::verify
