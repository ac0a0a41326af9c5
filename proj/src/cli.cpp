#include "mhl/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "mhl/rng.hpp"
#include "mhl_schemas.hpp"

namespace mhl::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void expect_object(const Json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) fail(where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
}

double number_at(const Json& j, const char* key, const std::string& where) {
  const Json& v = j.at(key);
  if (!v.is_number()) fail(where + "." + key + " must be a number");
  return v.get<double>();
}

int int_at(const Json& j, const char* key, const std::string& where, int lo, int hi) {
  const Json& v = j.at(key);
  if (!v.is_number_integer()) fail(where + "." + key + " must be an integer");
  const auto x = v.get<long long>();
  if (x < lo || x > hi)
    fail(where + "." + key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

std::vector<double> numbers_at(const Json& j, const char* key, const std::string& where) {
  const Json& v = j.at(key);
  if (!v.is_array()) fail(where + "." + key + " must be an array");
  std::vector<double> out;
  for (const Json& x : v) {
    if (!x.is_number()) fail(where + "." + key + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::string> strings_at(const Json& j, const char* key, const std::string& where,
                                    const std::set<std::string>& allowed) {
  const Json& v = j.at(key);
  if (!v.is_array()) fail(where + "." + key + " must be an array");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const Json& x : v) {
    if (!x.is_string() || !allowed.count(x.get<std::string>()))
      fail(where + "." + key + " holds an unsupported entry " + x.dump());
    if (!seen.insert(x.get<std::string>()).second)
      fail(where + "." + key + " repeats " + x.dump());
    out.push_back(x.get<std::string>());
  }
  return out;
}

DecompositionKind kind_from(const std::string& s) {
  for (auto k : {DecompositionKind::s, DecompositionKind::P, DecompositionKind::Q,
                 DecompositionKind::S, DecompositionKind::M})
    if (s == to_string(k)) return k;
  fail("unknown decomposition kind '" + s + "'");
}

HardySpace space_from(const std::string& s) {
  for (auto h : {HardySpace::WHs, HardySpace::WHS, HardySpace::WHM, HardySpace::WP, HardySpace::WQ})
    if (s == to_string(h)) return h;
  fail("unknown space '" + s + "'");
}

Json q_json(double q) { return std::isinf(q) ? Json("inf") : Json(q); }

const std::set<std::string> kExperiments = {"norms",        "decompose",   "validate",
                                            "equivalence",  "inequalities", "convergence",
                                            "sublinear",    "stopping"};

}  // namespace

const char* to_string(SeedSource source) {
  switch (source) {
    case SeedSource::Default: return "default";
    case SeedSource::Config: return "config";
    case SeedSource::Env: return "env";
    case SeedSource::Cli: return "cli";
  }
  return "default";
}

Config parse_config(const Json& j) {
  Config c;
  c.raw = j;
  expect_object(j, "config",
                {"schema_version", "seed", "filtration", "phi", "ensemble", "martingales",
                 "experiments", "kinds", "q", "t_grid", "weights", "lp", "sublinear",
                 "convergence", "output"});
  if (j.contains("schema_version") && j.at("schema_version") != 1)
    fail("schema_version must be 1");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer() || (!j.at("seed").is_number_unsigned() && j.at("seed").get<std::int64_t>() < 0)) fail("seed must be a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }

  auto& e = c.ensemble;
  if (j.contains("ensemble")) {
    const Json& en = j.at("ensemble");
    expect_object(en, "ensemble", {"trials", "depth_min", "depth_max", "scale", "zero"});
    if (en.contains("trials")) e.trials = int_at(en, "trials", "ensemble", 0, 100000);
    if (en.contains("depth_min")) e.depth_min = int_at(en, "depth_min", "ensemble", 1, 16);
    e.depth_max = e.depth_min;
    if (en.contains("depth_max")) e.depth_max = int_at(en, "depth_max", "ensemble", 1, 16);
    if (e.depth_max < e.depth_min) fail("ensemble.depth_max must be >= depth_min");
    if (en.contains("scale")) {
      e.scale = number_at(en, "scale", "ensemble");
      if (!(e.scale >= 0.0) || !std::isfinite(e.scale)) fail("ensemble.scale must be >= 0");
    }
    if (en.contains("zero")) {
      if (!en.at("zero").is_boolean()) fail("ensemble.zero must be a boolean");
      e.zero = en.at("zero").get<bool>();
    }
  }

  if (j.contains("filtration")) {
    const Json& fj = j.at("filtration");
    expect_object(fj, "filtration", {"type", "max_children", "probs", "levels"});
    if (!fj.contains("type") || !fj.at("type").is_string()) fail("filtration.type is required");
    const std::string type = fj.at("type").get<std::string>();
    if (type == "dyadic") {
      if (fj.size() != 1) fail("dyadic filtration takes no further keys");
      e.family = verify::FiltrationFamily::Dyadic;
    } else if (type == "random") {
      expect_object(fj, "filtration", {"type", "max_children"});
      e.family = verify::FiltrationFamily::Random;
      if (fj.contains("max_children"))
        e.max_children = int_at(fj, "max_children", "filtration", 1, 16);
    } else if (type == "explicit") {
      expect_object(fj, "filtration", {"type", "probs", "levels"});
      if (!fj.contains("probs") || !fj.contains("levels"))
        fail("explicit filtration needs probs and levels");
      try {
        e.fixed = share(io::filtration_from_json(fj));
      } catch (const std::exception& ex) {
        fail(std::string("invalid filtration: ") + ex.what());
      }
      e.family = verify::FiltrationFamily::Fixed;
    } else {
      fail("filtration.type must be dyadic, random or explicit");
    }
  }

  if (j.contains("phi")) c.phi = j.at("phi");
  try {
    const verify::PhiFactory probe(c.phi);
    if (e.fixed) probe.make(*e.fixed, 0);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    fail(std::string("invalid phi: ") + ex.what());
  }

  if (j.contains("martingales")) {
    const Json& mj = j.at("martingales");
    if (!mj.is_object()) fail("martingales must be an object");
    if (!e.fixed) fail("named martingales need an explicit filtration");
    for (const auto& [name, m] : mj.items()) {
      try {
        c.martingales.emplace_back(name, io::martingale_from_json(e.fixed, m));
      } catch (const std::exception& ex) {
        fail("martingale '" + name + "': " + ex.what());
      }
    }
  }

  if (j.contains("experiments"))
    c.experiments = strings_at(j, "experiments", "config", kExperiments);
  if (j.contains("kinds")) {
    c.kinds.clear();
    for (const auto& s : strings_at(j, "kinds", "config", {"s", "P", "Q", "S", "M"}))
      c.kinds.push_back(kind_from(s));
  }
  if (j.contains("q")) {
    if (!j.at("q").is_array()) fail("q must be an array");
    c.q.clear();
    for (const Json& x : j.at("q")) {
      if (x == "inf") {
        c.q.push_back(kInf);
      } else if (x.is_number() && x.get<double>() > 1.0) {
        c.q.push_back(x.get<double>());
      } else {
        fail("q entries must be numbers > 1 or \"inf\"");
      }
    }
  }
  if (j.contains("t_grid")) {
    const Json& g = j.at("t_grid");
    expect_object(g, "t_grid", {"lo", "hi", "points"});
    if (g.contains("lo")) c.grid.lo = number_at(g, "lo", "t_grid");
    if (g.contains("hi")) c.grid.hi = number_at(g, "hi", "t_grid");
    if (g.contains("points")) c.grid.points = int_at(g, "points", "t_grid", 2, 4096);
    if (!(c.grid.lo > 0.0 && c.grid.lo < c.grid.hi && std::isfinite(c.grid.hi)))
      fail("t_grid needs 0 < lo < hi");
  }
  c.inequalities.grid = c.grid;
  if (j.contains("weights")) {
    const Json& w = j.at("weights");
    expect_object(w, "weights", {"aq_q", "regularity_cap"});
    if (w.contains("aq_q")) {
      c.inequalities.aq_q = numbers_at(w, "aq_q", "weights");
      if (c.inequalities.aq_q.empty()) fail("weights.aq_q must not be empty");
      for (double q : c.inequalities.aq_q)
        if (!(q >= 1.0)) fail("weights.aq_q entries must be >= 1 (A_q needs q >= 1)");
    }
    if (w.contains("regularity_cap")) {
      c.inequalities.regularity_cap = number_at(w, "regularity_cap", "weights");
      if (!(c.inequalities.regularity_cap >= 1.0)) fail("weights.regularity_cap must be >= 1");
    }
  }
  if (j.contains("lp")) {
    c.inequalities.lp = numbers_at(j, "lp", "config");
    for (double p : c.inequalities.lp)
      if (!(p > 0.0)) fail("lp entries must be positive");
  }
  if (j.contains("sublinear")) {
    const Json& s = j.at("sublinear");
    expect_object(s, "sublinear", {"operators", "sources"});
    if (s.contains("operators"))
      c.sublinear_operators =
          strings_at(s, "operators", "sublinear", {"M", "S", "s", "terminal_square"});
    if (s.contains("sources")) {
      c.sublinear_sources.clear();
      for (const auto& name :
           strings_at(s, "sources", "sublinear", {"WHs", "WHS", "WHM", "WP", "WQ"}))
        c.sublinear_sources.push_back(space_from(name));
    }
  }
  if (j.contains("convergence")) {
    const Json& v = j.at("convergence");
    expect_object(v, "convergence", {"depth", "p", "truncations", "tolerances", "sequence_length"});
    auto& o = c.convergence;
    if (v.contains("depth")) o.depth = int_at(v, "depth", "convergence", 1, 20);
    if (v.contains("p")) o.p = number_at(v, "p", "convergence");
    if (!(o.p > 0.0)) fail("convergence.p must be positive");
    if (v.contains("truncations")) o.truncations = numbers_at(v, "truncations", "convergence");
    if (v.contains("tolerances")) o.tolerances = numbers_at(v, "tolerances", "convergence");
    for (double x : o.truncations)
      if (!(x > 0.0)) fail("convergence.truncations must be positive");
    for (double x : o.tolerances)
      if (!(x > 0.0)) fail("convergence.tolerances must be positive");
    if (v.contains("sequence_length"))
      o.sequence_length = int_at(v, "sequence_length", "convergence", 1, 1000);
  }
  if (j.contains("output")) {
    const Json& o = j.at("output");
    expect_object(o, "output", {"dir", "trials_csv"});
    if (o.contains("dir")) {
      if (!o.at("dir").is_string() || o.at("dir").get<std::string>().empty())
        fail("output.dir must be a nonempty string");
      c.out_dir = o.at("dir").get<std::string>();
    }
    if (o.contains("trials_csv")) {
      if (!o.at("trials_csv").is_boolean()) fail("output.trials_csv must be a boolean");
      c.trials_csv = o.at("trials_csv").get<bool>();
    }
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& ex) {
    fail(std::string("config is not valid JSON: ") + ex.what());
  }
  return parse_config(j);
}

SeedChoice resolve_seed(const Config& config, std::optional<std::uint64_t> flag,
                        const char* env_value) {
  if (flag) return {*flag, SeedSource::Cli};
  if (env_value != nullptr && *env_value != '\0') {
    const std::string s(env_value);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      fail("MHL_SEED must be a decimal unsigned 64-bit integer, got '" + s + "'");
    return {v, SeedSource::Env};
  }
  if (config.seed) return {*config.seed, SeedSource::Config};
  return {0, SeedSource::Default};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

namespace {

struct Source {
  std::string label;
  FiltrationPtr filtration;
  Martingale f;
  MOFunction phi;
};

std::vector<Source> sources(const Config& c, const verify::EnsembleSpec& ens,
                            const verify::PhiFactory& factory) {
  std::vector<Source> out;
  if (!c.martingales.empty()) {
    std::uint64_t salt = 0;
    for (const auto& [name, f] : c.martingales)
      out.push_back({name, f.filtration_ptr(), f,
                     factory.make(f.filtration(), derive_seed(ens.seed, {0x4e, salt++}))});
    return out;
  }
  for (auto& t : verify::make_trials(ens))
    out.push_back({"trial " + std::to_string(t.index), t.filtration, t.f,
                   factory.make(*t.filtration, t.seed)});
  return out;
}

void add_rows(std::ostringstream& csv, const std::string& experiment,
              const verify::EquivalenceReport& rep) {
  auto num = [](double x) { return std::isfinite(x) ? Json(x).dump() : std::string(); };
  for (const auto& t : rep.trials)
    csv << csv_field(experiment) << ',' << csv_field(rep.tag) << ',' << t.trial << ',' << t.depth
        << ',' << t.seed << ',' << num(t.lhs) << ',' << num(t.rhs) << ',' << num(t.ratio()) << ','
        << num(t.bound) << "\r\n";
}

SublinearOperator named_operator(const std::string& name) {
  if (name == "M") return builtin_operator(OperatorKind::Maximal);
  if (name == "S") return builtin_operator(OperatorKind::Square);
  if (name == "s") return builtin_operator(OperatorKind::ConditionalSquare);
  return {"terminal_square", [](const Martingale& f) {
            PointFunction g = f.terminal();
            for (double& x : g) x *= x;
            return g;
          }};
}

}  // namespace

RunResult run_experiments(const Config& c, SeedChoice seed) {
  verify::EnsembleSpec ens = c.ensemble;
  ens.seed = seed.seed;
  const verify::PhiFactory factory(c.phi);
  Json results = Json::object();
  Json assertions = Json::array();
  std::ostringstream csv;
  bool any_rows = false;
  auto assert_that = [&](const std::string& exp, const std::string& name, bool ok) {
    assertions.push_back({{"experiment", exp}, {"name", name}, {"pass", ok}});
  };
  auto rows = [&](const std::string& exp, const verify::EquivalenceReport& rep) {
    any_rows = any_rows || !rep.trials.empty();
    add_rows(csv, exp, rep);
  };
  auto check_regular = [&](const Filtration& F, DecompositionKind k) {
    if ((k == DecompositionKind::S || k == DecompositionKind::M) &&
        regularity_constant(F) > c.inequalities.regularity_cap)
      throw PreconditionError(std::string("kind ") + to_string(k) +
                              " needs a regular filtration (R <= regularity_cap)");
  };

  for (const std::string& exp : c.experiments) {
    if (exp == "norms") {
      Json arr = Json::array();
      bool ok = true;
      for (const auto& s : sources(c, ens, factory)) {
        Json n = Json::object();
        for (auto h : {HardySpace::WHs, HardySpace::WHS, HardySpace::WHM, HardySpace::WP,
                       HardySpace::WQ})
          n[to_string(h)] = space_norm(h, s.phi, s.f);
        ok = ok && n["WHM"].get<double>() <= n["WP"].get<double>() * (1.0 + 1e-9) &&
             n["WHS"].get<double>() <= n["WQ"].get<double>() * (1.0 + 1e-9);
        arr.push_back({{"source", s.label}, {"norms", n}});
      }
      results["norms"] = arr;
      assert_that(exp, "maximal and square norms dominated by WP and WQ", ok);
    } else if (exp == "decompose") {
      Json arr = Json::array();
      const auto srcs = sources(c, ens, factory);
      for (DecompositionKind k : c.kinds) {
        bool ok = true;
        for (const auto& s : srcs) {
          check_regular(*s.filtration, k);
          const Decomposition d = decompose(k, s.phi, s.f, c.grid);
          const Martingale back = reconstruct(d);
          double err = 0.0;
          for (int n = 0; n <= s.f.horizon(); ++n)
            for (std::size_t i = 0; i < s.filtration->num_points(); ++i)
              err = std::max(err, std::abs(back.at(n, i) - s.f.at(n, i)));
          Json entries = Json::array();
          for (const auto& en : d.entries)
            entries.push_back({{"k", en.k}, {"mu", en.mu}, {"nu", io::to_json(en.nu)}});
          const bool pass = err <= 1e-9;
          ok = ok && pass;
          Json item = {{"source", s.label},
                       {"kind", to_string(k)},
                       {"c_tilde", d.c_tilde},
                       {"k_min", d.k_min},
                       {"k_max", d.k_max},
                       {"entries", entries},
                       {"decomposition_norm", decomposition_norm(s.phi, d)},
                       {"space_norm", space_norm(matching_space(k), s.phi, s.f)},
                       {"reconstruction_error", err},
                       {"pass", pass}};
          if (k == DecompositionKind::S || k == DecompositionKind::M) {
            item["weight_constant"] = d.weight_constant;
            item["regularity"] = d.regularity;
          }
          arr.push_back(item);
        }
        assert_that(exp, std::string("reconstruction ") + to_string(k), ok);
      }
      results["decompose"] = arr;
    } else if (exp == "validate") {
      Json arr = Json::array();
      const auto srcs = sources(c, ens, factory);
      for (DecompositionKind k : c.kinds) {
        std::vector<std::size_t> failures(c.q.size(), 0);
        std::size_t atoms = 0;
        for (const auto& s : srcs) {
          check_regular(*s.filtration, k);
          const Decomposition d = decompose(k, s.phi, s.f, c.grid);
          atoms += d.entries.size();
          for (std::size_t e = 0; e < d.entries.size(); ++e)
            for (std::size_t qi = 0; qi < c.q.size(); ++qi)
              failures[qi] += !validate_atom(s.phi, d.atom(e), c.q[qi], c.grid).pass;
        }
        for (std::size_t qi = 0; qi < c.q.size(); ++qi) {
          arr.push_back({{"kind", to_string(k)}, {"q", q_json(c.q[qi])}, {"atoms", atoms},
                         {"failures", failures[qi]}, {"pass", failures[qi] == 0}});
          assert_that(exp, std::string("atoms ") + to_string(k) + " q=" + q_json(c.q[qi]).dump(),
                      failures[qi] == 0);
        }
      }
      results["validate"] = arr;
    } else if (exp == "equivalence") {
      Json arr = Json::array();
      for (DecompositionKind k : c.kinds) {
        for (const auto& t : verify::make_trials(ens)) check_regular(*t.filtration, k);
        verify::AtomicOptions opt{c.grid, c.q};
        const auto rep = verify::verify_atomic_equivalence(factory, k, ens, opt);
        rows(exp, rep);
        arr.push_back(rep.to_json());
        assert_that(exp, rep.tag, rep.pass);
      }
      results["equivalence"] = arr;
    } else if (exp == "inequalities") {
      const auto rep = verify::verify_martingale_inequalities(factory, ens, c.inequalities);
      for (const auto& item : rep.items) {
        rows(exp, item);
        if (!item.skipped) assert_that(exp, item.tag, item.pass);
      }
      results["inequalities"] = rep.to_json();
      assert_that(exp, "orthogonality", rep.summary["orthogonality"]["pass"].get<bool>());
      assert_that(exp, "square_vs_conditional",
                  rep.summary["square_vs_conditional"]["pass"].get<bool>());
    } else if (exp == "convergence") {
      const Json rep = verify::convergence_experiments(factory, ens, c.convergence);
      for (const char* part : {"counterexample", "modular", "dominated", "normalization"})
        assert_that(exp, part, rep.at(part).at("pass").get<bool>());
      results["convergence"] = rep;
    } else if (exp == "sublinear") {
      Json arr = Json::array();
      for (const auto& name : c.sublinear_operators)
        for (HardySpace src : c.sublinear_sources) {
          if (src == HardySpace::WHS || src == HardySpace::WHM)
            for (const auto& t : verify::make_trials(ens))
              check_regular(*t.filtration, src == HardySpace::WHS ? DecompositionKind::S
                                                                  : DecompositionKind::M);
          const auto rep = verify::verify_sublinear_boundedness(named_operator(name), factory, src,
                                                                ens, c.grid);
          rows(exp, rep);
          arr.push_back(rep.to_json());
          assert_that(exp, rep.tag, rep.pass);
        }
      results["sublinear"] = arr;
    } else if (exp == "stopping") {
      const Json rep = verify::verify_stopping_lemma(factory, ens, c.grid);
      assert_that(exp, "stopping lemma conclusions", rep.at("pass").get<bool>());
      results["stopping"] = rep;
    }
  }

  RunResult out;
  for (const auto& a : assertions) out.pass = out.pass && a.at("pass").get<bool>();
  out.report = {{"schema_version", "1.0.0"},
                {"tool", "mhl"},
                {"seed", seed.seed},
                {"seed_source", to_string(seed.source)},
                {"config", c.raw}};
  if (c.experiments.empty()) out.report["notice"] = "nothing to run";
  out.report["results"] = results;
  out.report["assertions"] = assertions;
  out.report["pass"] = out.pass;
  if (any_rows)
    out.csv = "experiment,tag,trial,depth,seed,lhs,rhs,ratio,bound\r\n" + csv.str();
  return out;
}

std::string describe(const Config& c) {
  std::ostringstream os;
  const auto& e = c.ensemble;
  if (c.experiments.empty()) {
    os << "nothing to run: the experiment list is empty\n";
    return os.str();
  }
  os << "phi: " << c.phi.dump() << "\n";
  if (!c.martingales.empty()) {
    os << "sources: " << c.martingales.size() << " named martingale(s) on the explicit filtration\n";
  } else {
    os << "ensemble: " << e.trials << " trial(s), filtration "
       << (e.family == verify::FiltrationFamily::Dyadic   ? "dyadic"
           : e.family == verify::FiltrationFamily::Random ? "random"
                                                           : "explicit");
    if (e.family != verify::FiltrationFamily::Fixed)
      os << ", depths " << e.depth_min << ".." << e.depth_max;
    os << (e.zero ? ", zero martingales" : "") << "\n";
  }
  std::string kinds;
  for (auto k : c.kinds) kinds += std::string(kinds.empty() ? "" : " ") + to_string(k);
  std::string qs;
  for (double q : c.q) qs += (qs.empty() ? "" : " ") + q_json(q).dump();
  for (const auto& exp : c.experiments) {
    os << "\n[" << exp << "]\n";
    if (exp == "norms") {
      os << "  WHs, WHS, WHM, WP, WQ weak norms per source\n"
         << "  asserts WHM <= WP and WHS <= WQ (constant 1)\n";
    } else if (exp == "decompose") {
      os << "  kinds: " << kinds << "\n"
         << "  k-range policy: [floor(log2 min positive) - 1, ceil(log2 max)] over every level\n"
         << "    of the controlling process (s_n, lambda_n, S_n or M_n)\n"
         << "  C~ = 2 (s, S), 3 (P, Q, M); asserts reconstruction within 1e-9\n"
         << "  gates: S and M need R <= " << c.inequalities.regularity_cap << " and a finite S- constant\n";
    } else if (exp == "validate") {
      os << "  kinds: " << kinds << "; q: " << qs << "\n"
         << "  asserts every canonical atom vanishes up to nu and meets the size bound\n";
    } else if (exp == "equivalence") {
      os << "  kinds: " << kinds << "; tags atomic:<kind>\n"
         << "  asserts decomposition_norm <= space_norm (s, P, Q) or <= (C K R)^(1/p-) space_norm (S, M)\n"
         << "  reports the reverse constant per depth\n";
    } else if (exp == "inequalities") {
      os << "  mi1   WHS <= C WHs          gates: S+, p+<2\n"
         << "  mi2   WHM <= C WHs          gates: A_inf, S, p+<2\n"
         << "  mi3   WHM <= WP, WHS <= WQ  no gate, asserted with constant 1\n"
         << "  mi4   WHS, WHs <= C WP; WHM <= C WQ   gates: A_inf, S\n"
         << "  mi5   WHs <= C WQ           gates: S-\n"
         << "  mi6   WP ~ WQ               gates: A_inf, S, p+<2\n"
         << "  coincide:*  all five norms pairwise   gates: regular, A_inf\n"
         << "  bl1..bl4  weighted L_p with w = phi(.,1) at p in the lp list\n"
         << "  orthogonality E[S^2] = E[s^2] = E[f_N^2] asserted to 1e-9\n";
    } else if (exp == "convergence") {
      const auto& o = c.convergence;
      os << "  counterexample: depth " << o.depth << ", p = " << o.p
         << ", truncation tails must keep weak norm 1\n"
         << "  modular and norm co-trending, bounded and dominated sequences ("
         << o.sequence_length << " steps), normalization\n";
    } else if (exp == "sublinear") {
      os << "  operators:";
      for (const auto& n : c.sublinear_operators) os << ' ' << n;
      os << "; sources:";
      for (auto s : c.sublinear_sources) os << ' ' << to_string(s);
      os << "\n  rejects operators failing sublinearity; reports the atom support constant\n";
    } else if (exp == "stopping") {
      os << "  stopping-lemma conclusions (a)-(d) on random nonnegative adapted processes\n"
         << "  (c) compared against K R with K the S- constant and R the regularity constant\n";
    }
  }
  return os.str();
}

const std::string& config_schema() {
  static const std::string s = embedded::kConfigSchema;
  return s;
}

const std::string& report_schema() {
  static const std::string s = embedded::kReportSchema;
  return s;
}

int run_command(const std::string& config_path, std::optional<std::string> out_dir,
                std::optional<std::uint64_t> seed_flag, std::ostream& out, std::ostream& err) {
  RunResult result;
  std::filesystem::path dir;
  try {
    const Config config = load_config(config_path);
    const SeedChoice seed = resolve_seed(config, seed_flag, std::getenv("MHL_SEED"));
    dir = out_dir.value_or(config.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      err << "error: cannot create output directory " << dir << ": " << ec.message() << "\n";
      return 2;
    }
    result = run_experiments(config, seed);
    if (config.trials_csv) {
      std::ofstream csv(dir / "trials.csv", std::ios::binary);
      csv << (result.csv.empty() ? "experiment,tag,trial,depth,seed,lhs,rhs,ratio,bound\r\n"
                                 : result.csv);
      if (!csv) {
        err << "error: cannot write " << (dir / "trials.csv") << "\n";
        return 2;
      }
    }
  } catch (const ConfigError& ex) {
    err << "config error: " << ex.what() << "\n";
    return 2;
  } catch (const PreconditionError& ex) {
    err << "precondition error: " << ex.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& ex) {
    err << "invalid input: " << ex.what() << "\n";
    return 2;
  }
  std::ofstream rep(dir / "report.json", std::ios::binary);
  rep << result.report.dump(2) << "\n";
  if (!rep) {
    err << "error: cannot write " << (dir / "report.json") << "\n";
    return 2;
  }
  if (result.report.contains("notice")) out << result.report["notice"].get<std::string>() << "\n";
  std::size_t failed = 0;
  for (const auto& a : result.report["assertions"])
    if (!a["pass"].get<bool>()) {
      ++failed;
      err << "FAIL " << a["experiment"].get<std::string>() << ": " << a["name"].get<std::string>()
          << "\n";
    }
  out << (result.pass ? "pass" : "fail") << ": " << result.report["assertions"].size()
      << " assertion(s), " << failed << " failed; report at " << (dir / "report.json").string()
      << "\n";
  return result.pass ? 0 : 1;
}

int describe_command(const std::string& config_path, std::ostream& out, std::ostream& err) {
  try {
    out << describe(load_config(config_path));
  } catch (const ConfigError& ex) {
    err << "config error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace mhl::cli
