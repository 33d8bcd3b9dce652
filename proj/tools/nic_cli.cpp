// nic: run named experiments, verify manifests, list the catalog.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "nic/experiments.hpp"

namespace {

std::filesystem::path default_out_root() {
  if (const char* env = std::getenv("NIC_OUT_ROOT"); env && *env) return env;
  return "results";
}

void print_verdicts(const std::vector<nic::Verdict>& verdicts) {
  for (const auto& v : verdicts)
    fmt::print("{} {}{}\n", v.pass ? "PASS" : "FAIL", v.name, v.detail.empty() ? "" : "  (" + v.detail + ")");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-score experiments for correlation-assisted random access codes"};
  app.require_subcommand(1);

  std::string name;
  std::string config_path;
  std::string out;
  std::vector<std::string> grid;
  std::uint64_t seed = 0;
  std::uint64_t episodes = 0;
  std::string interval;
  double level = 0.0;
  int threads = 0;
  int n_max = 0;

  auto* run = app.add_subcommand("run", "Run one experiment and write CSV + manifest");
  run->add_option("experiment", name, "Experiment name (see `list`)")->required();
  run->add_option("--config", config_path, "INI file with [general] and per-experiment sections")
      ->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--episodes", episodes, "Episodes per grid point");
  run->add_option("--out", out, "Output directory (default $NIC_OUT_ROOT/<experiment>)");
  run->add_option("--grid", grid, "Override an axis: key=v1,v2,... or key=lo:hi:step")->take_all();
  run->add_option("--interval", interval, "Interval method")
      ->check(CLI::IsMember({"wilson", "cp", "clopper-pearson", "hoeffding"}));
  run->add_option("--level", level, "Confidence level")->check(CLI::Range(0.5, 0.999999));
  run->add_option("--threads", threads, "Worker threads (default: all processors)")->check(CLI::NonNegativeNumber);
  run->add_option("--n-max", n_max, "Largest depth for boundary experiments")->check(CLI::Range(1, 60));

  std::string manifest;
  auto* verify = app.add_subcommand("verify", "Recheck checksums and verdicts of a finished run");
  verify->add_option("manifest", manifest, "Path to manifest.json or its directory")->required();

  auto* list = app.add_subcommand("list", "List experiments");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& e : nic::experiment_catalog())
        fmt::print("{:<16} {:<28} {}\n", e.name, e.exhibit, e.summary);
      return 0;
    }

    if (*verify) {
      std::filesystem::path p = manifest;
      if (std::filesystem::is_directory(p)) p /= nic::kManifestName;
      const auto report = nic::verify_manifest(p);
      print_verdicts(report.verdicts);
      for (const auto& problem : report.problems) fmt::print(stderr, "error: {}\n", problem);
      fmt::print("{}\n", report.pass ? "verify: pass" : "verify: FAIL");
      return report.pass ? 0 : 1;
    }

    nic::ExperimentConfig config = nic::default_config(name);
    config.out = default_out_root() / name;
    if (!config_path.empty()) nic::apply_ini(config, config_path);
    if (run->count("--seed")) config.seed = seed;
    if (run->count("--episodes")) config.episodes = episodes;
    if (run->count("--out")) config.out = out;
    if (run->count("--interval")) config.interval = nic::parse_interval_method(interval);
    if (run->count("--level")) config.level = level;
    if (run->count("--threads")) config.threads = threads;
    if (run->count("--n-max")) {
      if (!config.grid.count("n_max")) throw std::invalid_argument(name + " has no n_max axis");
      config.grid["n_max"] = {static_cast<double>(n_max)};
    }
    for (const auto& g : grid) {
      const auto eq = g.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--grid expects key=values, got '" + g + "'");
      const std::string key = g.substr(0, eq);
      if (!config.grid.count(key)) throw std::invalid_argument("unknown grid axis '" + key + "' for " + name);
      config.grid[key] = nic::parse_axis(g.substr(eq + 1));
    }

    const auto m = nic::run_experiment(config);
    for (const auto& f : m.files) fmt::print("wrote {}\n", (config.out / f.name).string());
    fmt::print("wrote {}\n", (config.out / nic::kManifestName).string());
    print_verdicts(m.verdicts);
    fmt::print("{:.2f} s\n", m.wall_clock_seconds);
    return m.all_pass() ? 0 : 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
