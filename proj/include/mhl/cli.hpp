#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mhl/verify.hpp"

namespace mhl::cli {

using io::Json;

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  Json raw;
  std::optional<std::uint64_t> seed;
  verify::EnsembleSpec ensemble;
  Json phi = {{"kind", "power"}, {"p", 1.0}};
  std::vector<std::string> experiments;
  std::vector<DecompositionKind> kinds = {DecompositionKind::s, DecompositionKind::P,
                                          DecompositionKind::Q, DecompositionKind::S,
                                          DecompositionKind::M};
  std::vector<double> q = {std::numeric_limits<double>::infinity(), 4.0};
  LogGrid grid;
  verify::InequalityOptions inequalities;
  verify::ConvergenceOptions convergence;
  std::vector<std::string> sublinear_operators = {"M", "S", "s"};
  std::vector<HardySpace> sublinear_sources = {HardySpace::WHs};
  /// Named martingales; only with an explicit filtration.
  std::vector<std::pair<std::string, Martingale>> martingales;
  std::string out_dir = "mhl-out";
  bool trials_csv = false;
};

/// Rejects unknown keys and out-of-range values with ConfigError.
Config parse_config(const Json& j);
Config load_config(const std::string& path);

enum class SeedSource { Default, Config, Env, Cli };
const char* to_string(SeedSource source);

struct SeedChoice {
  std::uint64_t seed = 0;
  SeedSource source = SeedSource::Default;
};

/// CLI flag, then the MHL_SEED value (decimal u64), then the config, then 0.
SeedChoice resolve_seed(const Config& config, std::optional<std::uint64_t> flag,
                        const char* env_value);

struct RunResult {
  Json report;
  /// RFC 4180 per-trial rows with a header; empty when no trial rows exist.
  std::string csv;
  bool pass = true;
};

/// Throws PreconditionError / ConfigError on unmet hypotheses or bad inputs.
RunResult run_experiments(const Config& config, SeedChoice seed);

/// Human-readable plan without running anything.
std::string describe(const Config& config);

const std::string& config_schema();
const std::string& report_schema();

/// Quotes a CSV field when it contains a comma, quote, CR or LF.
std::string csv_field(const std::string& s);

/// Subcommand bodies; return the process exit code (0 pass, 1 assertion
/// failure, 2 config or precondition error).
int run_command(const std::string& config_path, std::optional<std::string> out_dir,
                std::optional<std::uint64_t> seed_flag, std::ostream& out, std::ostream& err);
int describe_command(const std::string& config_path, std::ostream& out, std::ostream& err);

}  // namespace mhl::cli
