#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uavtrack/evaluation.hpp"
#include "uavtrack/frame_integrator.hpp"
#include "uavtrack/scan_sim.hpp"
#include "uavtrack/tracker.hpp"

namespace uavtrack {

// Plain-text CSV formats. Reals are written with 9 significant digits.
//
//   scans         scan_id,t,x,y,z
//   ground truth  t,x,y,z
//   trajectory    t,x,y,z,vx,vy,vz,status
//   frames        frame_k,scan_id,t,x,y,z
//   results       method,I,n,ape_median,q1,q3,whisker_lo,whisker_hi,mean,rmse,frames_lost[,seed,status]
//   box plot      label,method,I,whisker_lo,q1,median,q3,whisker_hi

inline constexpr const char* kScanHeader = "scan_id,t,x,y,z";
inline constexpr const char* kGroundTruthHeader = "t,x,y,z";
inline constexpr const char* kTrajectoryHeader = "t,x,y,z,vx,vy,vz,status";
inline constexpr const char* kFrameHeader = "frame_k,scan_id,t,x,y,z";
inline constexpr const char* kBoxplotHeader = "label,method,I,whisker_lo,q1,median,q3,whisker_hi";

struct ScanPointRow {
  std::size_t scan_id = 0;
  TimedPoint point;
};

struct TrajectoryRow {
  double t = 0.0;
  Point3 position = Point3::Zero();
  Vector3 velocity = Vector3::Zero();
  TrackStatus status;
};

/// A results-file line. seed is "all" on seed-aggregated rows; seed and status
/// are empty when the file carries only the base columns.
struct ResultRecord {
  ResultRow row;
  std::string seed;
  std::string status;
};

void write_scans(std::ostream& out, std::span<const Scan> scans);
std::vector<ScanPointRow> read_scan_rows(std::istream& in, const std::string& name);

/// Rebuilds n_scans consecutive scans (including empty ones) from point rows.
/// Scan i spans [start_time + i * period, start_time + (i + 1) * period].
std::vector<Scan> assemble_scans(std::span<const ScanPointRow> rows, std::size_t n_scans,
                                 double start_time, double period);

void write_ground_truth(std::ostream& out, std::span<const TimedPoint> gt);
std::vector<TimedPoint> read_ground_truth(std::istream& in, const std::string& name);

void write_trajectory(std::ostream& out, const TrackResult& result);
std::vector<TrajectoryRow> read_trajectory(std::istream& in, const std::string& name);

void write_frames(std::ostream& out, std::span<const Frame> frames);

void write_results(std::ostream& out, std::span<const ResultRecord> records);
/// Columns are located by header name; a missing base column is reported by name.
std::vector<ResultRecord> read_results(std::istream& in, const std::string& name);

// Path helpers. I/O failures raise Error naming the path.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace uavtrack
