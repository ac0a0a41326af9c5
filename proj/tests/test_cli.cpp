#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mhl/cli.hpp"

using namespace mhl;
using namespace mhl::cli;

namespace {

Json minimal() {
  return Json::parse(R"({"schema_version":1,"filtration":{"type":"dyadic"},"experiments":[]})");
}

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing rejects bad input") {
  CHECK_NOTHROW(parse_config(minimal()));
  auto j = minimal();
  j["unknown"] = 1;
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = minimal();
  j["weights"] = {{"aq_q", {0.5}}};
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = minimal();
  j["q"] = {1.0};
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = minimal();
  j["experiments"] = {"fly"};
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = minimal();
  j["martingales"] = {{"f", {{0, 0}, {1, -1}}}};
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = minimal();
  j["filtration"] = {{"type", "explicit"}, {"probs", {0.5, 0.5}},
                     {"levels", Json::parse("[[[0,1]],[[0],[1]]]")}};
  j["martingales"] = {{"f", {{1, 1}, {1, 1}}}};
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("seed precedence") {
  auto j = minimal();
  auto c = parse_config(j);
  CHECK(resolve_seed(c, std::nullopt, nullptr).source == SeedSource::Default);
  CHECK(resolve_seed(c, std::nullopt, nullptr).seed == 0);
  j["seed"] = 5;
  c = parse_config(j);
  CHECK(resolve_seed(c, std::nullopt, nullptr).seed == 5);
  CHECK(resolve_seed(c, std::nullopt, nullptr).source == SeedSource::Config);
  const auto env = resolve_seed(c, std::nullopt, "18446744073709551615");
  CHECK(env.seed == 18446744073709551615ULL);
  CHECK(env.source == SeedSource::Env);
  const auto flag = resolve_seed(c, 9, "11");
  CHECK(flag.seed == 9);
  CHECK(flag.source == SeedSource::Cli);
  CHECK_THROWS_AS(resolve_seed(c, std::nullopt, "abc"), ConfigError);
  CHECK_THROWS_AS(resolve_seed(c, std::nullopt, "-1"), ConfigError);
  CHECK_THROWS_AS(resolve_seed(c, std::nullopt, "18446744073709551616"), ConfigError);
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("x\ny") == "\"x\ny\"");
  CHECK(csv_field("") == "");
}

TEST_CASE("depth-one norms") {
  const auto c = load_config(std::string(MHL_SOURCE_DIR) + "/configs/norms_depth1.json");
  const auto r = run_experiments(c, resolve_seed(c, std::nullopt, nullptr));
  CHECK(r.pass);
  const auto& norms = r.report.at("results").at("norms").at(0).at("norms");
  for (const char* s : {"WHs", "WHS", "WHM", "WP", "WQ"})
    CHECK(norms.at(s).get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.report.at("seed").get<std::uint64_t>() == 1);
  CHECK(r.report.at("seed_source") == "config");
}

TEST_CASE("run_command writes reproducible outputs") {
  const auto dir = std::filesystem::temp_directory_path() / "mhl_cli_test";
  std::filesystem::remove_all(dir);
  const auto cfg = dir / "cfg.json";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(cfg);
    out << R"({"schema_version":1,"seed":3,"filtration":{"type":"dyadic"},
      "ensemble":{"trials":4,"depth_min":2,"depth_max":3},
      "experiments":["equivalence"],"kinds":["s","P"],
      "output":{"trials_csv":true}})";
  }
  std::ostringstream o, e;
  REQUIRE(run_command(cfg.string(), (dir / "a").string(), std::nullopt, o, e) == 0);
  REQUIRE(run_command(cfg.string(), (dir / "b").string(), std::nullopt, o, e) == 0);
  CHECK(read(dir / "a" / "report.json") == read(dir / "b" / "report.json"));
  const auto csv = read(dir / "a" / "trials.csv");
  CHECK(csv == read(dir / "b" / "trials.csv"));
  CHECK(csv.rfind("experiment,tag,trial,depth,seed,lhs,rhs,ratio,bound\r\n", 0) == 0);
  REQUIRE(run_command(cfg.string(), (dir / "c").string(), 4, o, e) == 0);
  CHECK(read(dir / "a" / "report.json") != read(dir / "c" / "report.json"));

  std::ostringstream o2, e2;
  CHECK(run_command((dir / "missing.json").string(), std::nullopt, std::nullopt, o2, e2) == 2);
  CHECK(describe_command(cfg.string(), o2, e2) == 0);
  CHECK(o2.str().find("equivalence") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("schemas are valid JSON") {
  CHECK(Json::parse(config_schema()).at("$schema").is_string());
  CHECK(Json::parse(report_schema()).at("$schema").is_string());
}
