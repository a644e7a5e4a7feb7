// uavtrack: simulate scans, track a UAV through them, and sweep methods x
// integration counts.
//
// Exit codes: 0 success, 1 usage, 2 input parse, 3 runtime.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "uavtrack/errors.hpp"
#include "uavtrack/harness.hpp"

namespace fs = std::filesystem;
using namespace uavtrack;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitRuntime = 3;

RunConfig resolve_config(const std::string& path, std::optional<std::uint64_t> seed,
                         std::optional<std::size_t> workers) {
  RunConfig cfg = path.empty() ? default_run_config() : load_config(path);
  if (seed) cfg.seeds = {*seed};
  if (workers) cfg.workers = *workers;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-scan integration UAV tracking toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string method = "kf";
  std::size_t integration = 2;
  std::string scan_file, gt_file, results_file;

  auto* simulate = app.add_subcommand("simulate", "Write synthetic scans and ground truth");
  simulate->add_option("--config", config_path, "Run configuration file")->check(CLI::ExistingFile);
  simulate->add_option("--out", out, "Output directory")->required();
  simulate->add_option("--seed", seed, "Random seed (default: first configured seed)");

  auto* trk = app.add_subcommand("track", "Track a UAV through a scan file");
  trk->add_option("scans", scan_file, "Scan file (scan_id,t,x,y,z)")->required();
  trk->add_option("ground_truth", gt_file, "Ground-truth file (t,x,y,z)")->required();
  trk->add_option("--config", config_path, "Run configuration file")->check(CLI::ExistingFile);
  trk->add_option("--out", out, "Trajectory output file")->required();
  trk->add_option("--method", method, "Tracking method")
      ->check(CLI::IsMember({"kf", "ekf", "cv"}, CLI::ignore_case));
  trk->add_option("--integration", integration, "Scans per frame")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "Run every method x integration count x seed");
  sweep->add_option("--config", config_path, "Run configuration file")->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "Output directory (default: config output_dir)");
  sweep->add_option("--seed", seed, "Run a single seed");
  sweep->add_option("--workers", workers, "Concurrent runs")->check(CLI::PositiveNumber);

  auto* plot = app.add_subcommand("plotdata", "Convert a results file to box-plot records");
  plot->add_option("results", results_file, "Results file")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", out, "Box-plot output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate) {
      const RunConfig cfg = resolve_config(config_path, seed, std::nullopt);
      const auto s = cmd_simulate(cfg, out, seed.value_or(cfg.seeds.at(0)));
      std::cout << "wrote " << s.scans << " scans (" << s.points << " points) and "
                << s.ground_truth_samples << " ground-truth samples to " << out << '\n';
    } else if (*trk) {
      const RunConfig cfg = resolve_config(config_path, std::nullopt, std::nullopt);
      const std::size_t rows = cmd_track(scan_file, gt_file, cfg, parse_method(method), integration, out);
      std::cout << "wrote " << rows << " trajectory rows to " << out << '\n';
    } else if (*sweep) {
      RunConfig cfg = resolve_config(config_path, seed, workers);
      const fs::path dir = out.empty() ? fs::path(cfg.output_dir) : fs::path(out);
      if (dir.empty()) throw UsageError("sweep needs --out or run.output_dir");
      const SweepResult r = cmd_sweep(cfg, dir);
      std::cout << "wrote " << r.records.size() << " result rows to " << (dir / "results.csv").string()
                << '\n';
      for (const RunOutcome& run : r.runs) {
        if (run.status == "failed") {
          std::cerr << "run " << to_string(run.spec.method) << " I=" << run.spec.integration_count
                    << " seed=" << run.spec.seed << " failed: " << run.message << '\n';
        }
      }
      if (r.any_failed) return kExitRuntime;
    } else if (*plot) {
      const std::size_t n = cmd_plotdata(results_file, out);
      std::cout << "wrote " << n << " box-plot records to " << out << '\n';
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
