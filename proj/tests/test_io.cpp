#include <doctest.h>

#include "mhl/io.hpp"
#include "mhl/verify.hpp"

using namespace mhl;
using io::Json;

TEST_CASE("filtration and martingale round trip bit-exactly") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto F = random_filtration(seed, 3, 4);
    const Json jf = io::to_json(*F);
    const auto G = share(io::filtration_from_json(Json::parse(jf.dump())));
    CHECK(*F == *G);
    CHECK(io::to_json(*G).dump() == jf.dump());

    const auto f = random_martingale(F, seed, 3.0);
    const Json jm = io::to_json(f);
    const auto g = io::martingale_from_json(G, Json::parse(jm.dump()));
    for (int n = 0; n <= f.horizon(); ++n) CHECK(f.level(n) == g.level(n));
  }
}

TEST_CASE("exchange documents") {
  const auto F = make_dyadic(2);
  io::Exchange doc{F, {}};
  doc.martingales.emplace("a", random_martingale(F, 1));
  doc.martingales.emplace("b", Martingale::zero(F));
  const Json j = io::to_json(doc);
  const auto back = io::exchange_from_json(Json::parse(j.dump()));
  CHECK(*back.filtration == *F);
  REQUIRE(back.martingales.size() == 2);
  CHECK(back.martingales.at("a").terminal() == doc.martingales.at("a").terminal());
  CHECK(io::to_json(back).dump() == j.dump());

  Json bad = j;
  bad["extra"] = 1;
  CHECK_THROWS_AS(io::exchange_from_json(bad), std::invalid_argument);
  Json unmartingale = j;
  unmartingale["martingales"]["c"] = Json::array({{1, 1, 1, 1}, {0, 0, 0, 0}, {0, 0, 0, 0}});
  CHECK_THROWS(io::exchange_from_json(unmartingale));
}

TEST_CASE("stopping times and decompositions round trip") {
  const auto F = make_dyadic(2);
  const StoppingTime tau(F, {1, 1, 3, 3});
  const Json jt = io::to_json(tau);
  CHECK(jt.dump() == "[1,1,null,null]");
  CHECK(io::stopping_time_from_json(F, jt) == tau);

  const auto f = random_martingale(F, 9);
  for (auto kind : {DecompositionKind::s, DecompositionKind::Q, DecompositionKind::M}) {
    const auto d = decompose(kind, MOFunction::power(0.9), f);
    const Json j = io::to_json(d);
    const auto e = io::decomposition_from_json(Json::parse(j.dump()));
    CHECK(e.kind == d.kind);
    CHECK(e.k_min == d.k_min);
    CHECK(e.k_max == d.k_max);
    REQUIRE(e.entries.size() == d.entries.size());
    for (std::size_t i = 0; i < d.entries.size(); ++i) {
      CHECK(e.entries[i].mu == d.entries[i].mu);
      CHECK(e.entries[i].nu == d.entries[i].nu);
      CHECK(e.entries[i].atom.terminal() == d.entries[i].atom.terminal());
    }
    CHECK(io::to_json(e).dump() == j.dump());
  }
}

TEST_CASE("phi serialization") {
  const std::vector<MOFunction> phis = {
      MOFunction::power(0.7),
      MOFunction::orlicz(OrliczProfile::power_log(1.2)),
      MOFunction::weighted({1.0, 2.5, 0.3}, OrliczProfile::power(1.5)),
      MOFunction::variable({0.6, 1.1, 1.9}),
  };
  for (const auto& phi : phis) {
    const Json j = io::to_json(phi);
    const auto back = io::phi_from_json(Json::parse(j.dump()));
    CHECK(back.kind() == phi.kind());
    for (std::size_t x = 0; x < 3; ++x)
      for (double t : {0.01, 0.5, 1.0, 7.0}) CHECK(back(x, t) == phi(x, t));
    CHECK(io::to_json(back).dump() == j.dump());
  }
  CHECK_THROWS(io::phi_from_json(Json{{"kind", "power"}, {"p", 1}, {"q", 2}}));
  CHECK_THROWS(io::phi_from_json(Json{{"kind", "power"}, {"p", -1}}));
  CHECK_THROWS(io::phi_from_json(Json{{"kind", "unknown"}}));
  CHECK_THROWS(io::to_json(MOFunction::custom("c", [](std::size_t, double t) { return t; },
                                              TypeIndices{}, true)));
}

TEST_CASE("malformed filtrations are rejected") {
  CHECK_THROWS(io::filtration_from_json(Json{{"probs", {0.5, 0.5}}}));
  CHECK_THROWS(io::filtration_from_json(
      Json::parse(R"({"probs":[0.5,0.5],"levels":[[[0,1]],[[0]]]})")));
  CHECK_THROWS(io::filtration_from_json(
      Json::parse(R"({"probs":[0.5,-0.5],"levels":[[[0,1]],[[0],[1]]]})")));
}

TEST_CASE("number maps non-finite values to null") {
  CHECK(verify::number(1.5) == Json(1.5));
  CHECK(verify::number(std::numeric_limits<double>::infinity()).is_null());
  CHECK(verify::number(std::nan("")).is_null());
}
