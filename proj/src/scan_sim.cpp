#include "uavtrack/scan_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>

#include "uavtrack/errors.hpp"

namespace uavtrack {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kTimeEps = 1e-9;

Vector3 direction_from_angles(double az_deg, double el_deg) {
  const double az = az_deg * kDeg;
  const double el = el_deg * kDeg;
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

std::mt19937_64 scan_rng(std::uint64_t seed, std::size_t scan_id) {
  const auto id = static_cast<std::uint64_t>(scan_id);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

void SensorModel::validate() const {
  if (!(fov_az_deg > 0.0 && fov_az_deg < 90.0) || !(fov_el_deg > 0.0 && fov_el_deg < 90.0)) {
    throw std::invalid_argument("SensorModel: FoV half-angles must lie in (0, 90) deg");
  }
  if (!(base_rate_hz > 0.0) || !std::isfinite(base_rate_hz)) {
    throw std::invalid_argument("SensorModel: base_rate must be > 0");
  }
  if (!(range_noise_sigma >= 0.0) || !(max_range > 0.0)) {
    throw std::invalid_argument("SensorModel: noise sigma must be >= 0 and max_range > 0");
  }
  if (!(rosette_omega > 0.0) || !(rosette_ratio > 0.0) ||
      !(rosette_primary_amplitude >= 0.0 && rosette_primary_amplitude <= 1.0)) {
    throw std::invalid_argument("SensorModel: invalid rosette parameters");
  }
  if (!(clutter_min_range > 0.0 && clutter_max_range >= clutter_min_range)) {
    throw std::invalid_argument("SensorModel: invalid clutter range interval");
  }
}

void TargetModel::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("TargetModel: radius must be > 0");
  }
  if (!(reflectivity_dropout >= 0.0 && reflectivity_dropout < 1.0)) {
    throw std::invalid_argument("TargetModel: dropout must lie in [0, 1)");
  }
}

// ---------------------------------------------------------------------------
// Trajectory

Trajectory::Trajectory(std::vector<Waypoint> waypoints, double start_time, double hold)
    : waypoints_(std::move(waypoints)), hold_(hold) {
  if (waypoints_.empty()) throw std::invalid_argument("Trajectory: no waypoints");
  if (!std::isfinite(start_time) || !(hold >= 0.0) || !std::isfinite(hold)) {
    throw std::invalid_argument("Trajectory: start time must be finite and hold >= 0");
  }
  times_.reserve(waypoints_.size());
  times_.push_back(start_time);
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    const Waypoint& w = waypoints_[i];
    if (!is_finite(w.position)) throw std::invalid_argument("Trajectory: non-finite waypoint");
    if (!(w.speed > 0.0) || !std::isfinite(w.speed)) {
      throw std::invalid_argument("Trajectory: waypoint speeds must be > 0");
    }
    if (i == 0) continue;
    const double length = (w.position - waypoints_[i - 1].position).norm();
    const double t = times_.back() + length / waypoints_[i - 1].speed;
    if (!(t > times_.back())) {
      throw std::invalid_argument("Trajectory: consecutive waypoints must be distinct");
    }
    times_.push_back(t);
  }
}

Trajectory Trajectory::stationary(const Point3& p, double duration, double start_time) {
  return Trajectory({Waypoint{p, 1.0}}, start_time, duration);
}

std::size_t Trajectory::segment_at(double t) const {
  // Index i such that times_[i] <= t < times_[i + 1], clamped to the last segment.
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - times_.begin() - 1, 0));
  return std::min(idx, times_.size() - 1);
}

Point3 Trajectory::position(double t) const {
  if (t <= times_.front()) return waypoints_.front().position;
  if (t >= times_.back()) return waypoints_.back().position;
  const std::size_t i = segment_at(t);
  const double alpha = (t - times_[i]) / (times_[i + 1] - times_[i]);
  return waypoints_[i].position + alpha * (waypoints_[i + 1].position - waypoints_[i].position);
}

Vector3 Trajectory::velocity(double t) const {
  if (t < times_.front() || t >= times_.back()) return Vector3::Zero();
  const std::size_t i = segment_at(t);
  return (waypoints_[i + 1].position - waypoints_[i].position) / (times_[i + 1] - times_[i]);
}

// ---------------------------------------------------------------------------
// Pattern and scans

double azimuth_deg(const Vector3& d) { return std::atan2(d.y(), d.x()) / kDeg; }

double elevation_deg(const Vector3& d) {
  return std::atan2(d.z(), std::hypot(d.x(), d.y())) / kDeg;
}

bool in_fov(const SensorModel& sensor, const Vector3& d) {
  constexpr double kAngleEps = 1e-9;
  return d.x() > 0.0 && std::abs(azimuth_deg(d)) <= sensor.fov_az_deg + kAngleEps &&
         std::abs(elevation_deg(d)) <= sensor.fov_el_deg + kAngleEps;
}

std::vector<PatternRay> gen_pattern(const SensorModel& sensor, double t0, double phase) {
  std::vector<PatternRay> rays;
  rays.reserve(sensor.points_per_scan);
  const double n = static_cast<double>(sensor.points_per_scan);
  const double dt = sensor.scan_period() / n;
  const double a1 = sensor.rosette_primary_amplitude;
  const double a2 = 1.0 - a1;
  const double w1 = sensor.rosette_omega;
  const double w2 = w1 * sensor.rosette_ratio;
  for (std::size_t i = 0; i < sensor.points_per_scan; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    const double tp = t + phase;
    const double u = a1 * std::cos(w1 * tp) + a2 * std::cos(w2 * tp);
    const double v = a1 * std::sin(w1 * tp) - a2 * std::sin(w2 * tp);
    const double az = std::clamp(u * sensor.fov_az_deg, -sensor.fov_az_deg, sensor.fov_az_deg);
    const double el = std::clamp(v * sensor.fov_el_deg, -sensor.fov_el_deg, sensor.fov_el_deg);
    rays.push_back({direction_from_angles(az, el), t});
  }
  return rays;
}

double pattern_phase(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  return std::uniform_real_distribution<double>(0.0, 100.0)(rng);
}

Scan simulate_scan(const SensorModel& sensor, const TargetModel& target, const Trajectory& traj,
                   std::size_t scan_id, std::uint64_t seed) {
  Scan scan;
  scan.scan_id = scan_id;
  scan.t_start = traj.start_time() + static_cast<double>(scan_id) * sensor.scan_period();
  scan.t_end = scan.t_start + sensor.scan_period();
  if (scan.t_end > traj.end_time() + kTimeEps) {
    throw TimeDomainError("scan " + std::to_string(scan_id) + " ends at t=" +
                          std::to_string(scan.t_end) + " beyond trajectory end t=" +
                          std::to_string(traj.end_time()));
  }

  auto rng = scan_rng(seed, scan_id);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double r2 = target.radius * target.radius;

  for (const PatternRay& ray : gen_pattern(sensor, scan.t_start, pattern_phase(seed))) {
    const Point3 c = traj.position(ray.t);
    // Near root of |s d - c|^2 = r^2 along the unit ray d.
    const double b = ray.direction.dot(c);
    const double disc = b * b - (c.squaredNorm() - r2);
    if (disc < 0.0) continue;
    const double range = b - std::sqrt(disc);
    if (range <= 0.0 || range > sensor.max_range) continue;
    if (target.reflectivity_dropout > 0.0 && uniform(rng) < target.reflectivity_dropout) continue;
    const double measured =
        sensor.range_noise_sigma > 0.0 ? range + sensor.range_noise_sigma * noise(rng) : range;
    scan.points.push_back({measured * ray.direction, ray.t});
  }

  for (std::size_t i = 0; i < sensor.clutter_per_scan; ++i) {
    const double az = (2.0 * uniform(rng) - 1.0) * sensor.fov_az_deg;
    const double el = (2.0 * uniform(rng) - 1.0) * sensor.fov_el_deg;
    const double range = sensor.clutter_min_range +
                         uniform(rng) * (sensor.clutter_max_range - sensor.clutter_min_range);
    const double t = scan.t_start + uniform(rng) * sensor.scan_period();
    scan.points.push_back({range * direction_from_angles(az, el), t});
  }
  if (sensor.clutter_per_scan > 0) {
    std::stable_sort(scan.points.begin(), scan.points.end(),
                     [](const TimedPoint& a, const TimedPoint& b) { return a.t < b.t; });
  }
  return scan;
}

std::size_t scan_count(const SensorModel& sensor, const Trajectory& traj) {
  return static_cast<std::size_t>(std::floor(traj.duration() * sensor.base_rate_hz + kTimeEps));
}

std::vector<Scan> simulate_run(const SensorModel& sensor, const TargetModel& target,
                               const Trajectory& traj, std::uint64_t seed) {
  sensor.validate();
  target.validate();
  const std::size_t n = scan_count(sensor, traj);
  std::vector<Scan> scans;
  scans.reserve(n);
  for (std::size_t i = 0; i < n; ++i) scans.push_back(simulate_scan(sensor, target, traj, i, seed));
  return scans;
}

std::vector<TimedPoint> gen_ground_truth(const Trajectory& traj, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("gen_ground_truth: rate must be > 0");
  }
  const auto n = static_cast<std::size_t>(std::floor(traj.duration() * rate + kTimeEps));
  std::vector<TimedPoint> out;
  out.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = traj.start_time() + static_cast<double>(k) / rate;
    out.push_back({traj.position(t), t});
  }
  return out;
}

std::size_t angular_coverage(const SensorModel& sensor, const std::vector<Vector3>& directions) {
  std::set<std::pair<long, long>> cells;
  for (const Vector3& d : directions) {
    if (!in_fov(sensor, d)) continue;
    cells.emplace(static_cast<long>(std::floor(azimuth_deg(d) + sensor.fov_az_deg)),
                  static_cast<long>(std::floor(elevation_deg(d) + sensor.fov_el_deg)));
  }
  return cells.size();
}

}  // namespace uavtrack
