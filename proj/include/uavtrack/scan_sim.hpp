#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "uavtrack/geometry.hpp"

namespace uavtrack {

/// Solid-state LiDAR with a rectangular field of view and a rosette
/// (two counter-rotating prism) scan pattern.
struct SensorModel {
  double fov_az_deg = 40.85;  // half-width; full FoV 81.7 deg
  double fov_el_deg = 12.55;  // half-height; full FoV 25.1 deg
  double base_rate_hz = 100.0;
  std::size_t points_per_scan = 2400;
  double range_noise_sigma = 0.01;
  double max_range = 260.0;
  // Pattern: u(t) = a (cos w t, sin w t) + (1 - a) (cos r w t, -sin r w t),
  // stretched onto the FoV rectangle.
  double rosette_omega = 300.0;  // rad/s
  double rosette_ratio = 7.919;
  double rosette_primary_amplitude = 0.5;
  // Uniform background clutter, off by default.
  std::size_t clutter_per_scan = 0;
  double clutter_min_range = 1.0;
  double clutter_max_range = 30.0;

  double scan_period() const { return 1.0 / base_rate_hz; }
  void validate() const;

  bool operator==(const SensorModel&) const = default;
};

/// The tracked UAV, modelled as a sphere.
struct TargetModel {
  double radius = 0.3;
  double reflectivity_dropout = 0.0;

  void validate() const;

  bool operator==(const TargetModel&) const = default;
};

struct Waypoint {
  Point3 position = Point3::Zero();
  double speed = 1.0;  // m/s along the segment that starts here

  bool operator==(const Waypoint&) const = default;
};

/// Piecewise-linear ground-truth path. Waypoint i is reached at
/// start_time + sum of segment lengths / speeds; after the last waypoint the
/// target hovers for `hold` seconds.
class Trajectory {
 public:
  Trajectory() : Trajectory({Waypoint{}}, 0.0, 0.0) {}
  Trajectory(std::vector<Waypoint> waypoints, double start_time = 0.0, double hold = 0.0);

  static Trajectory stationary(const Point3& p, double duration, double start_time = 0.0);

  Point3 position(double t) const;
  Vector3 velocity(double t) const;

  double start_time() const { return times_.front(); }
  double end_time() const { return times_.back() + hold_; }
  double duration() const { return end_time() - start_time(); }
  double hold() const { return hold_; }
  const std::vector<Waypoint>& waypoints() const { return waypoints_; }
  /// Arrival time at each waypoint.
  const std::vector<double>& waypoint_times() const { return times_; }

  bool operator==(const Trajectory& other) const {
    return waypoints_ == other.waypoints_ && hold_ == other.hold_ &&
           start_time() == other.start_time();
  }

 private:
  std::size_t segment_at(double t) const;

  std::vector<Waypoint> waypoints_;
  std::vector<double> times_;
  double hold_ = 0.0;
};

struct PatternRay {
  Vector3 direction = Vector3::UnitX();  // unit vector, sensor frame (x fwd, y left, z up)
  double t = 0.0;
};

struct Scan {
  std::vector<TimedPoint> points;
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t scan_id = 0;
};

/// Azimuth/elevation of a direction in degrees.
double azimuth_deg(const Vector3& d);
double elevation_deg(const Vector3& d);
bool in_fov(const SensorModel& sensor, const Vector3& direction);

/// points_per_scan rays of the scan starting at t0. The pattern phase is the
/// absolute ray time plus `phase` seconds, so consecutive scans trace
/// different directions.
std::vector<PatternRay> gen_pattern(const SensorModel& sensor, double t0, double phase = 0.0);

/// Pattern time offset of a run: where the sensor's scan pattern stood when
/// the run began. Drawn from the seed alone, in [0, 100) s.
double pattern_phase(std::uint64_t seed);

/// Scan `scan_id` of a run beginning at traj.start_time(). Throws
/// TimeDomainError when the scan interval leaves the trajectory's domain.
Scan simulate_scan(const SensorModel& sensor, const TargetModel& target, const Trajectory& traj,
                   std::size_t scan_id, std::uint64_t seed);

/// Number of whole scans that fit in the trajectory's time domain.
std::size_t scan_count(const SensorModel& sensor, const Trajectory& traj);

/// All scans of a run, in scan_id order.
std::vector<Scan> simulate_run(const SensorModel& sensor, const TargetModel& target,
                               const Trajectory& traj, std::uint64_t seed);

/// Exact positions on a uniform grid start_time + k / rate, k = 0 .. floor(duration * rate).
std::vector<TimedPoint> gen_ground_truth(const Trajectory& traj, double rate);

/// Number of 1 deg x 1 deg cells of the FoV hit by at least one direction.
std::size_t angular_coverage(const SensorModel& sensor, const std::vector<Vector3>& directions);

}  // namespace uavtrack
