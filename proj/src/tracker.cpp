#include "uavtrack/tracker.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "uavtrack/errors.hpp"
#include "uavtrack/kdtree.hpp"

namespace uavtrack {

namespace {

constexpr double kPi = std::numbers::pi;

using Matrix36 = Eigen::Matrix<double, 3, 6>;
using Matrix63 = Eigen::Matrix<double, 6, 3>;

void symmetrize(Matrix6& p) { p = 0.5 * (p + p.transpose()).eval(); }

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  return a <= -kPi ? a + 2.0 * kPi : a;
}

void require_positive_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("predict: dt must be finite and > 0");
  }
}

// Kalman gain and Joseph-form posterior for H = [I 0], R = sigma^2 I.
// Rows listed in `frozen` get a zero gain.
void position_update(Vector6& x, Matrix6& p, const Point3& z, double sigma_z, int frozen = -1) {
  const Eigen::Matrix3d s = p.topLeftCorner<3, 3>() + sigma_z * sigma_z * Eigen::Matrix3d::Identity();
  Matrix63 k = s.ldlt().solve(p.topRows<3>()).transpose();
  if (frozen >= 0) k.row(frozen).setZero();
  x += k * (z - x.head<3>());
  Matrix36 h = Matrix36::Zero();
  h.leftCols<3>().setIdentity();
  const Matrix6 a = Matrix6::Identity() - k * h;
  p = a * p * a.transpose() + sigma_z * sigma_z * k * k.transpose();
  symmetrize(p);
}

// d(speed, heading, pitch) / d(vx, vy, vz)
Eigen::Matrix3d polar_from_cartesian_jacobian(double speed, double heading, double pitch,
                                              bool hold_heading) {
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double ch = std::cos(heading), sh = std::sin(heading);
  Eigen::Matrix3d g;
  g.row(0) << cp * ch, cp * sh, sp;
  if (hold_heading) {
    g.row(1).setZero();
  } else {
    g.row(1) << -sh / (speed * cp), ch / (speed * cp), 0.0;
  }
  g.row(2) << -sp * ch / speed, -sp * sh / speed, cp / speed;
  return g;
}

// d(vx, vy, vz) / d(speed, heading, pitch)
Eigen::Matrix3d cartesian_from_polar_jacobian(double speed, double heading, double pitch) {
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double ch = std::cos(heading), sh = std::sin(heading);
  Eigen::Matrix3d g;
  g.col(0) << cp * ch, cp * sh, sp;
  g.col(1) << -speed * cp * sh, speed * cp * ch, 0.0;
  g.col(2) << -speed * sp * ch, -speed * sp * sh, speed * cp;
  return g;
}

// Brings (speed, heading, pitch) back to speed >= 0, pitch in [-pi/2, pi/2],
// heading in (-pi, pi], transforming the covariance with the sign flips.
void normalize_polar(Vector6& x, Matrix6& p) {
  Vector6 flip = Vector6::Ones();
  if (x(3) < 0.0) {
    x(3) = -x(3);
    x(4) += kPi;
    x(5) = -x(5);
    flip(3) = -1.0;
    flip(5) = -flip(5);
  }
  if (x(5) > kPi / 2.0 || x(5) < -kPi / 2.0) {
    x(5) = (x(5) > 0.0 ? kPi : -kPi) - x(5);
    x(4) += kPi;
    flip(5) = -flip(5);
  }
  x(4) = wrap_angle(x(4));
  p = flip.asDiagonal() * p * flip.asDiagonal();
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(Method m) {
  switch (m) {
    case Method::kKf: return "kf";
    case Method::kEkf: return "ekf";
    case Method::kCv: return "cv";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "kf") return Method::kKf;
  if (lower == "ekf") return Method::kEkf;
  if (lower == "cv") return Method::kCv;
  throw UsageError("unknown method '" + s + "' (expected kf, ekf or cv)");
}

std::string to_string(const TrackStatus& s) {
  switch (s.kind) {
    case TrackStatus::Kind::kTracking: return "tracking";
    case TrackStatus::Kind::kCoasting: return "coasting:" + std::to_string(s.coast_frames);
    case TrackStatus::Kind::kLost: return "lost";
  }
  return "?";
}

TrackStatus parse_status(const std::string& s) {
  if (s == "tracking") return TrackStatus::tracking();
  if (s == "lost") return TrackStatus::lost();
  constexpr std::string_view prefix = "coasting:";
  if (s.starts_with(prefix)) {
    const std::string digits = s.substr(prefix.size());
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(),
                                       [](unsigned char c) { return std::isdigit(c); })) {
      return TrackStatus::coasting(std::stoul(digits));
    }
  }
  throw std::invalid_argument("unknown track status '" + s + "'");
}

void TrackerConfig::validate() const {
  if (!(search_radius > 0.0) || !(sigma_a > 0.0) || !(sigma_z > 0.0) ||
      !(initial_velocity_sigma > 0.0)) {
    throw std::invalid_argument("TrackerConfig: radius, sigma_a, sigma_z must be > 0");
  }
}

// ---------------------------------------------------------------------------
// KF

Matrix6 cv_transition(double dt) {
  Matrix6 f = Matrix6::Identity();
  f.topRightCorner<3, 3>() = dt * Eigen::Matrix3d::Identity();
  return f;
}

Matrix6 white_noise_acceleration(double dt, double sigma_a) {
  const double q = sigma_a * sigma_a;
  const double dt2 = dt * dt;
  Matrix6 out = Matrix6::Zero();
  const Eigen::Matrix3d i3 = Eigen::Matrix3d::Identity();
  out.topLeftCorner<3, 3>() = q * dt2 * dt2 / 4.0 * i3;
  out.topRightCorner<3, 3>() = q * dt2 * dt / 2.0 * i3;
  out.bottomLeftCorner<3, 3>() = q * dt2 * dt / 2.0 * i3;
  out.bottomRightCorner<3, 3>() = q * dt2 * i3;
  return out;
}

UavState initial_state(const Point3& x0, double t0, const TrackerConfig& cfg) {
  UavState s;
  s.position = x0;
  s.velocity.setZero();
  Vector6 d;
  const double pz = cfg.sigma_z * cfg.sigma_z;
  const double pv = cfg.initial_velocity_sigma * cfg.initial_velocity_sigma;
  d << pz, pz, pz, pv, pv, pv;
  s.covariance = d.asDiagonal();
  s.t = t0;
  return s;
}

UavState kf_predict(const UavState& state, double dt, double sigma_a) {
  require_positive_dt(dt);
  const Matrix6 f = cv_transition(dt);
  UavState out = state;
  out.position = state.position + state.velocity * dt;
  out.velocity = state.velocity;
  out.covariance = f * state.covariance * f.transpose() + white_noise_acceleration(dt, sigma_a);
  symmetrize(out.covariance);
  out.t = state.t + dt;
  return out;
}

UavState kf_update(const UavState& state, const Measurement& meas, double sigma_z) {
  Vector6 x;
  x << state.position, state.velocity;
  UavState out = state;
  position_update(x, out.covariance, meas.z, sigma_z);
  out.position = x.head<3>();
  out.velocity = x.tail<3>();
  return out;
}

// ---------------------------------------------------------------------------
// EKF

Vector6 EkfState::vector() const {
  Vector6 v;
  v << position, speed, heading, pitch;
  return v;
}

EkfState EkfState::from_vector(const Vector6& v, const Matrix6& covariance, double t) {
  EkfState s;
  s.position = v.head<3>();
  s.speed = v(3);
  s.heading = v(4);
  s.pitch = v(5);
  s.covariance = covariance;
  s.t = t;
  s.gimbal_degenerate = std::cos(s.pitch) < kGimbalCosLimit;
  return s;
}

Vector6 ekf_transition(const Vector6& x, double dt) {
  const double s = x(3), h = x(4), g = x(5);
  Vector6 out = x;
  out(0) += s * std::cos(g) * std::cos(h) * dt;
  out(1) += s * std::cos(g) * std::sin(h) * dt;
  out(2) += s * std::sin(g) * dt;
  return out;
}

Matrix6 ekf_transition_jacobian(const Vector6& x, double dt) {
  const double s = x(3), h = x(4), g = x(5);
  const double cg = std::cos(g), sg = std::sin(g), ch = std::cos(h), sh = std::sin(h);
  Matrix6 f = Matrix6::Identity();
  f(0, 3) = cg * ch * dt;
  f(0, 4) = -s * cg * sh * dt;
  f(0, 5) = -s * sg * ch * dt;
  f(1, 3) = cg * sh * dt;
  f(1, 4) = s * cg * ch * dt;
  f(1, 5) = -s * sg * sh * dt;
  f(2, 3) = sg * dt;
  f(2, 5) = s * cg * dt;
  return f;
}

EkfState ekf_initial_state(const Point3& x0, double t0, const TrackerConfig& cfg) {
  Vector6 d;
  const double pz = cfg.sigma_z * cfg.sigma_z;
  d << pz, pz, pz, cfg.initial_velocity_sigma * cfg.initial_velocity_sigma, (kPi / 2) * (kPi / 2),
      (kPi / 4) * (kPi / 4);
  Vector6 x = Vector6::Zero();
  x.head<3>() = x0;
  return EkfState::from_vector(x, d.asDiagonal(), t0);
}

EkfState ekf_predict(const EkfState& state, double dt, double sigma_a) {
  require_positive_dt(dt);
  const Vector6 x = state.vector();
  const Matrix6 f = ekf_transition_jacobian(x, dt);

  // Cartesian white-noise acceleration mapped into the polar velocity block.
  Matrix6 t = Matrix6::Identity();
  const bool degenerate = std::cos(state.pitch) < kGimbalCosLimit;
  t.bottomRightCorner<3, 3>() = polar_from_cartesian_jacobian(
      std::max(state.speed, kEkfSpeedFloor), state.heading, state.pitch, degenerate);
  const Matrix6 q = t * white_noise_acceleration(dt, sigma_a) * t.transpose();

  Matrix6 p = f * state.covariance * f.transpose() + q;
  symmetrize(p);
  return EkfState::from_vector(ekf_transition(x, dt), p, state.t + dt);
}

EkfState ekf_update(const EkfState& state, const Measurement& meas, double sigma_z) {
  Vector6 x = state.vector();
  Matrix6 p = state.covariance;
  // Heading is held when the pitch sits at the pole.
  position_update(x, p, meas.z, sigma_z, state.gimbal_degenerate ? 4 : -1);
  normalize_polar(x, p);
  return EkfState::from_vector(x, p, state.t);
}

UavState to_uav_state(const EkfState& state) {
  const double cg = std::cos(state.pitch);
  UavState out;
  out.position = state.position;
  out.velocity = state.speed * Vector3(cg * std::cos(state.heading), cg * std::sin(state.heading),
                                       std::sin(state.pitch));
  Matrix6 t = Matrix6::Identity();
  t.bottomRightCorner<3, 3>() =
      cartesian_from_polar_jacobian(state.speed, state.heading, state.pitch);
  out.covariance = t * state.covariance * t.transpose();
  symmetrize(out.covariance);
  out.t = state.t;
  return out;
}

// ---------------------------------------------------------------------------
// Detection

std::optional<Measurement> extract_measurement(const Frame& frame, const Point3& center,
                                               double radius) {
  const KdTree tree(frame.positions());
  const std::vector<Point3> inside = tree.radius_search(center, radius);
  if (inside.empty()) return std::nullopt;
  for (const Point3& p : inside) {
    if (!within_radius(p, center, radius)) {
      throw std::logic_error("extract_measurement: point outside the search radius");
    }
  }
  return Measurement{centroid(inside), frame.timestamp(), inside.size()};
}

namespace {

Matrix6 detection_covariance(double sigma_z, double dt) {
  Vector6 d;
  const double pz = sigma_z * sigma_z;
  const double pv = 2.0 * pz / (dt * dt);
  d << pz, pz, pz, pv, pv, pv;
  return d.asDiagonal();
}

// Each filter exposes predict(t) -> predicted position, update(meas, sigma),
// and state() -> Cartesian view. A predict without update is a coast.
class KfFilter {
 public:
  KfFilter(const Point3& x0, double t0, const TrackerConfig& cfg)
      : state_(initial_state(x0, t0, cfg)), sigma_a_(cfg.sigma_a) {}
  Point3 predict(double t) {
    state_ = kf_predict(state_, t - state_.t, sigma_a_);
    return state_.position;
  }
  void update(const Measurement& m, double sigma_z) { state_ = kf_update(state_, m, sigma_z); }
  UavState state() const { return state_; }

 private:
  UavState state_;
  double sigma_a_;
};

class EkfFilter {
 public:
  EkfFilter(const Point3& x0, double t0, const TrackerConfig& cfg)
      : state_(ekf_initial_state(x0, t0, cfg)), sigma_a_(cfg.sigma_a) {}
  Point3 predict(double t) {
    state_ = ekf_predict(state_, t - state_.t, sigma_a_);
    return state_.position;
  }
  void update(const Measurement& m, double sigma_z) { state_ = ekf_update(state_, m, sigma_z); }
  UavState state() const { return to_uav_state(state_); }

 private:
  EkfState state_;
  double sigma_a_;
};

class CvDetector {
 public:
  CvDetector(const Point3& x0, double t0, const TrackerConfig& cfg)
      : state_(initial_state(x0, t0, cfg)), sigma_a_(cfg.sigma_a) {}
  explicit CvDetector(const UavState& prev, double sigma_a) : state_(prev), sigma_a_(sigma_a) {}
  Point3 predict(double t) {
    previous_ = state_;
    state_ = kf_predict(state_, t - state_.t, sigma_a_);
    return state_.position;
  }
  void update(const Measurement& m, double sigma_z) {
    const double dt = state_.t - previous_.t;
    state_.position = m.z;
    state_.velocity = (m.z - previous_.position) / dt;
    state_.covariance = detection_covariance(sigma_z, dt);
  }
  UavState state() const { return state_; }

 private:
  UavState state_;
  UavState previous_;
  double sigma_a_;
};

double effective_sigma(const TrackerConfig& cfg, const Measurement& m) {
  return cfg.scale_noise_by_support ? cfg.sigma_z / std::sqrt(static_cast<double>(m.support))
                                    : cfg.sigma_z;
}

template <class Filter>
TrackResult run_track(std::span<const Frame> frames, Filter filter, const TrackerConfig& cfg) {
  TrackResult result;
  result.frames_total = frames.size();
  std::size_t misses = 0;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const Frame& frame = frames[k];
    TrackStep step;
    step.frame = k;
    step.prediction = filter.predict(frame.timestamp());
    const auto meas = extract_measurement(frame, step.prediction, cfg.search_radius);
    if (meas) {
      filter.update(*meas, effective_sigma(cfg, *meas));
      misses = 0;
      step.status = TrackStatus::tracking();
      step.support = meas->support;
    } else {
      ++misses;
      step.status = (k == 0 || misses > cfg.max_coast) ? TrackStatus::lost()
                                                       : TrackStatus::coasting(misses);
    }
    step.state = filter.state();
    result.steps.push_back(step);
    if (step.status.kind == TrackStatus::Kind::kLost) {
      result.lost_at = k;
      break;
    }
  }
  return result;
}

}  // namespace

std::optional<UavState> cv_step(const UavState& prev, const Frame& frame, const TrackerConfig& cfg) {
  CvDetector detector(prev, cfg.sigma_a);
  const Point3 prediction = detector.predict(frame.timestamp());
  const auto meas = extract_measurement(frame, prediction, cfg.search_radius);
  if (!meas) return std::nullopt;
  detector.update(*meas, effective_sigma(cfg, *meas));
  return detector.state();
}

std::vector<TimedPoint> TrackResult::estimates() const {
  std::vector<TimedPoint> out;
  out.reserve(steps.size());
  for (const TrackStep& s : steps) {
    if (s.status.kind != TrackStatus::Kind::kLost) out.push_back({s.state.position, s.state.t});
  }
  return out;
}

std::size_t TrackResult::frames_lost() const { return frames_total - estimates().size(); }

TrackResult track(std::span<const Frame> frames, const Point3& x0, const TrackerConfig& cfg) {
  cfg.validate();
  if (frames.empty()) return {};
  const double t0 = frames.front().t_start;
  switch (cfg.method) {
    case Method::kKf: return run_track(frames, KfFilter(x0, t0, cfg), cfg);
    case Method::kEkf: return run_track(frames, EkfFilter(x0, t0, cfg), cfg);
    case Method::kCv: return run_track(frames, CvDetector(x0, t0, cfg), cfg);
  }
  return {};
}

}  // namespace uavtrack
