#include <CLI11.hpp>

#include <iostream>

#include "mhl/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weak martingale Musielak-Orlicz Hardy space experiments"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run the experiments in a config and write report.json");
  run->add_option("--config", config, "Path to the JSON config")->required();
  auto* out_opt = run->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  auto* seed_opt = run->add_option("--seed", seed, "Seed (overrides MHL_SEED and the config)");

  std::string describe_config;
  auto* describe = app.add_subcommand("describe", "Print the plan for a config without running");
  describe->add_option("--config", describe_config, "Path to the JSON config")->required();

  bool report = false;
  auto* schema = app.add_subcommand("schema", "Print the config JSON schema");
  schema->add_flag("--report", report, "Print the report schema instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run)
    return mhl::cli::run_command(config, *out_opt ? std::optional(out_dir) : std::nullopt,
                                 *seed_opt ? std::optional(seed) : std::nullopt, std::cout,
                                 std::cerr);
  if (*describe) return mhl::cli::describe_command(describe_config, std::cout, std::cerr);
  if (*schema) {
    std::cout << (report ? mhl::cli::report_schema() : mhl::cli::config_schema());
    return 0;
  }
  return 2;
}
