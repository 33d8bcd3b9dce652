#pragma once

// Named experiments, their CSV outputs, and the run manifest used by
// `nic run` / `nic verify`.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "nic/estimation.hpp"

namespace nic {

struct ExperimentInfo {
  std::string name;
  std::string exhibit;
  std::string summary;
  bool stochastic = false;
};

/// Every experiment the runner knows, in `list` order.
const std::vector<ExperimentInfo>& experiment_catalog();
const ExperimentInfo& find_experiment(const std::string& name);

using Grid = std::map<std::string, std::vector<double>>;

struct ExperimentConfig {
  std::string experiment;
  Grid grid;
  std::uint64_t episodes = 0;
  std::uint64_t seed = 1;
  std::filesystem::path out;
  IntervalMethod interval = IntervalMethod::wilson;
  double level = 0.95;
  int threads = 0;  ///< 0: runtime default

  /// Grid axis by name; throws std::out_of_range naming the key.
  const std::vector<double>& axis(const std::string& key) const;
};

/// Defaults for `name`, including its parameter grid.
ExperimentConfig default_config(const std::string& name);

/// Overlays `[name]` keys of an INI file (and `[general]` before it).
/// Grid axes are comma-separated numbers; `a:b:step` expands a range.
void apply_ini(ExperimentConfig& config, const std::filesystem::path& path);

/// Parses "v1,v2,..." or "lo:hi:step" into numbers.
std::vector<double> parse_axis(const std::string& text);

/// Throws std::invalid_argument on empty axes or out-of-range values.
void validate(const ExperimentConfig& config);

/// Canonical JSON of the settings that determine the outputs.
nlohmann::json config_echo(const ExperimentConfig& config);
/// First 16 hex digits of SHA-256 over the canonical echo.
std::string config_hash(const ExperimentConfig& config);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct CsvTable {
  std::string name;  ///< file name, e.g. "table1.csv"
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& key) const;
  double number(std::size_t row, const std::string& key) const;
  const std::string& text(std::size_t row, const std::string& key) const;
};

/// Text of a table with the "# config_hash=... experiment=..." first line.
std::string render_csv(const CsvTable& table, const std::string& hash, const std::string& experiment);
CsvTable parse_csv(const std::string& name, const std::string& text);

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct OutputFile {
  std::string name;
  std::string sha256;
};

struct RunManifest {
  nlohmann::json config;
  std::string code_version;
  std::string config_hash;
  std::vector<OutputFile> files;
  double wall_clock_seconds = 0.0;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
};

void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

inline constexpr const char* kManifestName = "manifest.json";

/// Computes the experiment's tables without touching the filesystem.
std::vector<CsvTable> compute_experiment(const ExperimentConfig& config);

/// Acceptance verdicts from the tables alone, so they can be re-derived
/// from files on disk.
std::vector<Verdict> judge_experiment(const ExperimentConfig& config, const std::vector<CsvTable>& tables);

/// Writes CSVs and manifest.json under config.out. Throws
/// std::runtime_error if the directory cannot be written.
RunManifest run_experiment(const ExperimentConfig& config);

struct VerifyReport {
  bool pass = true;
  std::vector<std::string> problems;
  std::vector<Verdict> verdicts;
};

/// Recomputes checksums and verdicts for a manifest on disk.
VerifyReport verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace nic
