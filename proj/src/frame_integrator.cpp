#include "uavtrack/frame_integrator.hpp"

#include <cmath>
#include <string>

#include "uavtrack/errors.hpp"

namespace uavtrack {

namespace {
constexpr double kTimeEps = 1e-9;
}

double frame_rate(double base_rate_hz, std::size_t integration_count) {
  if (integration_count < 1) throw InvalidIntegrationError("integration count must be >= 1");
  return base_rate_hz / static_cast<double>(integration_count);
}

Frame integrate(std::span<const Scan> scans, std::size_t k) {
  if (scans.empty()) throw InvalidIntegrationError("integrate: no scans");
  std::size_t total = 0;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    total += scans[i].points.size();
    if (i == 0) continue;
    const Scan& prev = scans[i - 1];
    if (scans[i].scan_id != prev.scan_id + 1) {
      throw DiscontiguousError("scan " + std::to_string(scans[i].scan_id) + " does not follow scan " +
                               std::to_string(prev.scan_id));
    }
    if (std::abs(scans[i].t_start - prev.t_end) > kTimeEps) {
      throw DiscontiguousError("scan " + std::to_string(scans[i].scan_id) +
                               " does not start where scan " + std::to_string(prev.scan_id) +
                               " ends");
    }
  }

  Frame frame;
  frame.k = k;
  frame.integration_count = scans.size();
  frame.t_start = scans.front().t_start;
  frame.t_end = scans.back().t_end;
  frame.points.reserve(total);
  for (const Scan& s : scans) {
    frame.scan_ids.push_back(s.scan_id);
    frame.scan_offsets.push_back(frame.points.size());
    frame.points.insert(frame.points.end(), s.points.begin(), s.points.end());
  }
  return frame;
}

std::vector<Frame> frame_stream(std::span<const Scan> scans, std::size_t integration_count) {
  if (integration_count < 1) throw InvalidIntegrationError("integration count must be >= 1");
  const std::size_t n_frames = scans.size() / integration_count;
  std::vector<Frame> frames;
  frames.reserve(n_frames);
  for (std::size_t k = 0; k < n_frames; ++k) {
    frames.push_back(integrate(scans.subspan(k * integration_count, integration_count), k));
  }
  return frames;
}

}  // namespace uavtrack
