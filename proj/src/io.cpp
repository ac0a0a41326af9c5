#include "mhl/io.hpp"

#include <stdexcept>

namespace mhl::io {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Json profile_json(const OrliczProfile& p) {
  return {{"type", p.shape() == OrliczProfile::Shape::Power ? "power" : "power_log"},
          {"p", p.exponent()}};
}

OrliczProfile profile_from(const Json& j) {
  require(j.is_object(), "orlicz profile must be an object");
  for (const auto& [key, _] : j.items())
    require(key == "type" || key == "p", "unknown orlicz key '" + key + "'");
  const std::string type = j.at("type").get<std::string>();
  const double p = j.at("p").get<double>();
  if (type == "power") return OrliczProfile::power(p);
  if (type == "power_log") return OrliczProfile::power_log(p);
  throw std::invalid_argument("unknown orlicz type '" + type + "'");
}

void only_keys(const Json& j, std::initializer_list<const char*> keys) {
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    require(known, "unknown key '" + key + "'");
  }
}

}  // namespace

Json to_json(const Filtration& filtration) {
  Json levels = Json::array();
  for (int n = 0; n <= filtration.horizon(); ++n) levels.push_back(filtration.partition(n));
  const auto probs = filtration.space().probs();
  return {{"probs", std::vector<double>(probs.begin(), probs.end())}, {"levels", levels}};
}

Filtration filtration_from_json(const Json& j) {
  return Filtration(ProbSpace(j.at("probs").get<std::vector<double>>()),
                    j.at("levels").get<std::vector<Partition>>());
}

Json to_json(const Martingale& f) { return f.process().point_matrix(); }

Martingale martingale_from_json(const FiltrationPtr& filtration, const Json& j) {
  auto values = j.get<std::vector<PointFunction>>();
  require(static_cast<int>(values.size()) == filtration->horizon() + 1,
          "martingale must have one row per level");
  for (const auto& row : values)
    require(row.size() == filtration->num_points(), "martingale row has wrong length");
  return Martingale(AdaptedProcess(filtration, values));
}

Json to_json(const Exchange& doc) {
  Json j = to_json(*doc.filtration);
  Json ms = Json::object();
  for (const auto& [name, f] : doc.martingales) ms[name] = to_json(f);
  j["martingales"] = ms;
  return j;
}

Exchange exchange_from_json(const Json& j) {
  only_keys(j, {"probs", "levels", "martingales"});
  Exchange doc{share(filtration_from_json(j)), {}};
  if (j.contains("martingales"))
    for (const auto& [name, m] : j.at("martingales").items())
      doc.martingales.emplace(name, martingale_from_json(doc.filtration, m));
  return doc;
}

Json to_json(const StoppingTime& tau) {
  Json out = Json::array();
  for (std::size_t i = 0; i < tau.values().size(); ++i) {
    if (tau.finite_at(i))
      out.push_back(tau.at(i));
    else
      out.push_back(nullptr);
  }
  return out;
}

StoppingTime stopping_time_from_json(const FiltrationPtr& filtration, const Json& j) {
  std::vector<int> values;
  for (const auto& v : j) values.push_back(v.is_null() ? filtration->horizon() + 1 : v.get<int>());
  return StoppingTime(filtration, std::move(values));
}

Json to_json(const Decomposition& d) {
  Json entries = Json::array();
  for (const auto& e : d.entries)
    entries.push_back({{"k", e.k}, {"mu", e.mu}, {"nu", to_json(e.nu)}, {"atom", to_json(e.atom)}});
  return {{"kind", to_string(d.kind)},
          {"c_tilde", d.c_tilde},
          {"k_min", d.k_min},
          {"k_max", d.k_max},
          {"weight_constant", d.weight_constant},
          {"regularity", d.regularity},
          {"filtration", to_json(*d.filtration)},
          {"entries", entries}};
}

Decomposition decomposition_from_json(const Json& j) {
  Decomposition d;
  const std::string kind = j.at("kind").get<std::string>();
  bool found = false;
  for (auto k : {DecompositionKind::s, DecompositionKind::P, DecompositionKind::Q,
                 DecompositionKind::S, DecompositionKind::M})
    if (kind == to_string(k)) {
      d.kind = k;
      found = true;
    }
  require(found, "unknown decomposition kind '" + kind + "'");
  d.c_tilde = j.at("c_tilde").get<double>();
  d.k_min = j.at("k_min").get<int>();
  d.k_max = j.at("k_max").get<int>();
  d.weight_constant = j.at("weight_constant").get<double>();
  d.regularity = j.at("regularity").get<double>();
  d.filtration = share(filtration_from_json(j.at("filtration")));
  for (const auto& e : j.at("entries"))
    d.entries.push_back({e.at("k").get<int>(), e.at("mu").get<double>(),
                         martingale_from_json(d.filtration, e.at("atom")),
                         stopping_time_from_json(d.filtration, e.at("nu"))});
  return d;
}

Json to_json(const MOFunction& phi) {
  switch (phi.kind()) {
    case PhiKind::Power:
      return {{"kind", "power"}, {"p", phi.orlicz_profile()->exponent()}};
    case PhiKind::Orlicz:
      return {{"kind", "orlicz"}, {"orlicz", profile_json(*phi.orlicz_profile())}};
    case PhiKind::Weighted:
      return {{"kind", "weighted"}, {"w", phi.weights()},
              {"orlicz", profile_json(*phi.orlicz_profile())}};
    case PhiKind::Variable:
      return {{"kind", "variable"}, {"p", phi.exponents()}};
    case PhiKind::Custom:
      break;
  }
  throw std::invalid_argument("custom phi '" + phi.name() + "' cannot be serialized");
}

MOFunction phi_from_json(const Json& j) {
  require(j.is_object(), "phi must be an object");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "power") {
    only_keys(j, {"kind", "p"});
    return MOFunction::power(j.at("p").get<double>());
  }
  if (kind == "orlicz") {
    only_keys(j, {"kind", "orlicz"});
    return MOFunction::orlicz(profile_from(j.at("orlicz")));
  }
  if (kind == "weighted") {
    only_keys(j, {"kind", "w", "orlicz"});
    return MOFunction::weighted(j.at("w").get<std::vector<double>>(), profile_from(j.at("orlicz")));
  }
  if (kind == "variable") {
    only_keys(j, {"kind", "p"});
    return MOFunction::variable(j.at("p").get<std::vector<double>>());
  }
  throw std::invalid_argument("unknown phi kind '" + kind + "'");
}

}  // namespace mhl::io
