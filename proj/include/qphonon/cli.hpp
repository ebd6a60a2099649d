#pragma once

// Configuration-driven entry point. One JSON document per run:
//   {"schema_version": 1, "command": "<name>", "seed": 0, "<name>": {...}}
// Unknown keys anywhere are configuration errors. Frequencies are angular
// (rad per unit time), hbar = 1.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qphonon/pulse.hpp"

namespace qphonon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct TimeGridConfig {
  double t_end = 0.0;
  std::size_t samples = 2;
  std::vector<double> grid() const;
};

struct EvolveConfig {
  int n_total = 1;
  double omega_e = 1.0;
  PulseProfile pulse;
  TimeGridConfig time;
  double max_step = 0.02;
  double quadrature_step = 0.005;
};

struct SweepConfig {
  std::vector<int> n_values;  // sorted ascending, unique
  double omega_e = 1.0;
  PulseProfile pulse;
  TimeGridConfig time;
  double max_step = 0.02;
  double quadrature_step = 0.005;
};

struct AlgebraCheckConfig {
  std::vector<int> n_values;
  std::vector<std::pair<int, int>> dressed_pairs;
  int random_pairs = 0;
  int random_max = 200;
};

struct DressedEvolution {
  double mu_d = 0.0;
  double omega_e = 1.0;
  double omega_g = 0.0;
  double omega_0 = 0.0;
  TimeGridConfig time;
  double max_step = 0.02;
};

struct DressedCheckConfig {
  std::vector<std::pair<int, int>> pairs;
  int random_pairs = 0;
  int random_max = 200;
  std::optional<DressedEvolution> evolution;
};

struct RabiConfig {
  int n_total = 1;
  double g = 0.0;
  double omega_e = 1.0;
  double omega_f = 1.0;
  TimeGridConfig time;
  double max_step = 0.02;
};

using CommandConfig = std::variant<AlgebraCheckConfig, EvolveConfig, SweepConfig, DressedCheckConfig, RabiConfig>;

struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> output_dir;
  CommandConfig params;
};

/// Strict validation; throws ConfigError naming the offending field path.
RunConfig parse_config(const nlohmann::json& document);

struct OutputFile {
  std::string name;
  std::string contents;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<OutputFile> files;  // CSV tables
  nlohmann::json report;
};

/// Runs one validated command. `workers` bounds sweep parallelism.
CommandResult execute(const RunConfig& config, unsigned workers);

/// Writes every file plus <command>_report.json into `dir`, each through a
/// temporary file and a rename.
void write_outputs(const CommandResult& result, const std::string& command, const std::filesystem::path& dir);

/// Full `qphonon <command> --config <path> [--output-dir <path>] [--workers <k>]`.
/// Returns 0, 1 or 2 and never throws.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Shared CSV number format: 17 significant digits.
std::string format_number(double v);

}  // namespace qphonon::cli
