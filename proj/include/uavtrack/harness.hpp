#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uavtrack/csv_io.hpp"
#include "uavtrack/evaluation.hpp"
#include "uavtrack/scan_sim.hpp"
#include "uavtrack/tracker.hpp"

namespace uavtrack {

/// Everything a simulate / track / sweep invocation needs.
///
/// Text form: `[section]` headers followed by `key = value` lines; `#` starts
/// a comment. Sections: sensor, target, trajectory, tracker, run. Trajectory
/// waypoints are repeated `waypoint = x y z speed` lines. Lists are comma
/// separated. Keys not given keep their defaults.
struct RunConfig {
  SensorModel sensor;
  TargetModel target;
  Trajectory trajectory;
  TrackerConfig tracker;
  std::vector<Method> methods{Method::kKf, Method::kEkf, Method::kCv};
  std::vector<std::size_t> integration_counts{2, 5, 10, 20, 50};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t workers = 1;
  double gt_rate = 100.0;
  std::string output_dir;

  bool operator==(const RunConfig&) const = default;
};

/// Open-area flight at 2.5-23 m from the sensor, 0.5-3 m/s, with several
/// heading changes.
Trajectory default_trajectory();
RunConfig default_run_config();

/// Throws UsageError when the config cannot drive a run.
void validate(const RunConfig& cfg);

RunConfig parse_config(std::string_view text, const std::string& name = "<config>");
std::string render_config(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);

// -- Runs -------------------------------------------------------------------

struct RunSpec {
  Method method = Method::kKf;
  std::size_t integration_count = 2;
  std::uint64_t seed = 0;
};

/// KF and EKF at every integration count; CV once, at the smallest count.
/// Ordered by method, then integration count, then seed.
std::vector<RunSpec> sweep_plan(const RunConfig& cfg);

struct RunOutcome {
  RunSpec spec;
  TrackResult track;
  std::vector<double> errors;
  ApeReport report;
  std::string status;  // ok | lost | failed
  std::string message;
};

/// Integrates, tracks and evaluates one run on already simulated scans.
RunOutcome execute_run(const RunConfig& cfg, const RunSpec& spec, std::span<const Scan> scans,
                       std::span<const TimedPoint> ground_truth);

struct SweepResult {
  std::vector<RunOutcome> runs;       // sweep_plan order
  std::vector<ResultRecord> records;  // per-seed rows, then the aggregate, per (method, I)
  bool any_failed = false;
};

SweepResult run_sweep(const RunConfig& cfg);

// -- Commands ---------------------------------------------------------------

struct SimulateSummary {
  std::size_t scans = 0;
  std::size_t points = 0;
  std::size_t ground_truth_samples = 0;
};

/// Writes scans.csv and ground_truth.csv into out_dir.
SimulateSummary cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir,
                             std::uint64_t seed);

/// Tracks the scans in scan_path, starting from the ground-truth position at
/// the first frame; writes one trajectory row per processed frame. Returns the
/// row count.
std::size_t cmd_track(const std::filesystem::path& scan_path, const std::filesystem::path& gt_path,
                      const RunConfig& cfg, Method method, std::size_t integration_count,
                      const std::filesystem::path& out_path);

/// Writes results.csv and trajectories/<method>_I<n>_seed<s>.csv into out_dir.
SweepResult cmd_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir);

struct BoxRecord {
  std::string label;  // I2_KF ... I50_EKF, CV
  std::string method;
  std::size_t integration_count = 0;
  ApeReport report;
};

/// One record per (method, I), in box-plot axis order: KF by ascending I, EKF
/// by ascending I, then CV. Only seed-aggregated rows are used when the
/// results carry a seed column.
std::vector<BoxRecord> boxplot_records(std::span<const ResultRecord> results);
std::string render_boxplot(std::span<const BoxRecord> records);

/// Returns the number of records written.
std::size_t cmd_plotdata(const std::filesystem::path& results_path,
                         const std::filesystem::path& out_path);

}  // namespace uavtrack
