#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uavtrack/scan_sim.hpp"

namespace uavtrack {

/// I consecutive scans concatenated into one cloud.
struct Frame {
  std::vector<TimedPoint> points;
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t k = 0;
  std::size_t integration_count = 1;
  std::vector<std::size_t> scan_ids;
  std::vector<std::size_t> scan_offsets;  // first point index of each scan

  /// Measurement time of the frame: the end of its last scan.
  double timestamp() const { return t_end; }
  std::vector<Point3> positions() const { return positions_of(points); }
};

/// Effective frame rate when integrating I scans at base_rate.
double frame_rate(double base_rate_hz, std::size_t integration_count);

/// Concatenates scans into frame k. Throws InvalidIntegrationError on an empty
/// input and DiscontiguousError when scan ids or times are not consecutive.
Frame integrate(std::span<const Scan> scans, std::size_t k = 0);

/// Non-overlapping windows of I scans; a trailing remainder shorter than I is dropped.
std::vector<Frame> frame_stream(std::span<const Scan> scans, std::size_t integration_count);

}  // namespace uavtrack
