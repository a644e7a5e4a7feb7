#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "uavtrack/frame_integrator.hpp"
#include "uavtrack/geometry.hpp"

namespace uavtrack {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

enum class Method { kKf, kEkf, kCv };

std::string to_string(Method m);
/// Accepts "kf", "ekf", "cv" (case-insensitive). Throws UsageError otherwise.
Method parse_method(const std::string& s);

/// Cartesian constant-velocity state; covariance ordered [x y z vx vy vz].
struct UavState {
  Point3 position = Point3::Zero();
  Vector3 velocity = Vector3::Zero();
  Matrix6 covariance = Matrix6::Identity();
  double t = 0.0;
};

/// Polar-velocity state [x y z speed heading pitch] used by the EKF.
struct EkfState {
  Point3 position = Point3::Zero();
  double speed = 0.0;
  double heading = 0.0;  // (-pi, pi]
  double pitch = 0.0;    // [-pi/2, pi/2]
  Matrix6 covariance = Matrix6::Identity();
  double t = 0.0;
  bool gimbal_degenerate = false;

  Vector6 vector() const;
  static EkfState from_vector(const Vector6& v, const Matrix6& covariance, double t);
};

struct TrackerConfig {
  double search_radius = 0.5;
  double sigma_a = 2.0;   // white-noise acceleration, m/s^2
  double sigma_z = 0.05;  // centroid measurement noise, m
  std::size_t max_coast = 5;
  Method method = Method::kKf;
  bool scale_noise_by_support = false;
  double initial_velocity_sigma = 1.0;

  void validate() const;

  bool operator==(const TrackerConfig&) const = default;
};

struct Measurement {
  Point3 z = Point3::Zero();
  double t = 0.0;
  std::size_t support = 1;
};

struct TrackStatus {
  enum class Kind { kTracking, kCoasting, kLost };
  Kind kind = Kind::kTracking;
  std::size_t coast_frames = 0;

  static TrackStatus tracking() { return {Kind::kTracking, 0}; }
  static TrackStatus coasting(std::size_t n) { return {Kind::kCoasting, n}; }
  static TrackStatus lost() { return {Kind::kLost, 0}; }

  bool operator==(const TrackStatus&) const = default;
};

/// "tracking", "coasting:N" or "lost".
std::string to_string(const TrackStatus& s);
TrackStatus parse_status(const std::string& s);

// -- Linear constant-velocity Kalman filter ---------------------------------

Matrix6 cv_transition(double dt);

/// Discrete white-noise-acceleration covariance, per axis
/// sigma_a^2 [[dt^4/4, dt^3/2], [dt^3/2, dt^2]].
Matrix6 white_noise_acceleration(double dt, double sigma_a);

UavState initial_state(const Point3& x0, double t0, const TrackerConfig& cfg);

UavState kf_predict(const UavState& state, double dt, double sigma_a);

/// Linear update with H = [I 0] and R = sigma_z^2 I. Joseph-form covariance.
/// The caller is responsible for predicting the state to meas.t first.
UavState kf_update(const UavState& state, const Measurement& meas, double sigma_z);

// -- Polar-velocity EKF ----------------------------------------------------

/// Speed below which the process-noise mapping treats the target as moving at
/// this speed, keeping heading/pitch noise bounded.
inline constexpr double kEkfSpeedFloor = 0.25;
inline constexpr double kGimbalCosLimit = 1e-6;

Vector6 ekf_transition(const Vector6& x, double dt);
Matrix6 ekf_transition_jacobian(const Vector6& x, double dt);

EkfState ekf_initial_state(const Point3& x0, double t0, const TrackerConfig& cfg);
EkfState ekf_predict(const EkfState& state, double dt, double sigma_a);
EkfState ekf_update(const EkfState& state, const Measurement& meas, double sigma_z);

/// Cartesian view of an EKF state; covariance mapped through the velocity Jacobian.
UavState to_uav_state(const EkfState& state);

// -- Tracking by detection ---------------------------------------------------

/// Points of `frame` within `radius` of `center`, averaged. nullopt when the
/// ball is empty.
std::optional<Measurement> extract_measurement(const Frame& frame, const Point3& center,
                                               double radius);

/// One constant-velocity detection step: predict, gate, and take the centroid
/// as the new position. nullopt when no point falls inside the gate.
std::optional<UavState> cv_step(const UavState& prev, const Frame& frame, const TrackerConfig& cfg);

// -- Full loop ---------------------------------------------------------------

struct TrackStep {
  std::size_t frame = 0;
  UavState state;
  TrackStatus status;
  Point3 prediction = Point3::Zero();
  std::size_t support = 0;
};

struct TrackResult {
  std::vector<TrackStep> steps;
  std::optional<std::size_t> lost_at;  // frame index at which the track was declared lost
  std::size_t frames_total = 0;

  /// Timed positions of every step that is not Lost.
  std::vector<TimedPoint> estimates() const;
  /// Frames without a tracking or coasting estimate.
  std::size_t frames_lost() const;
};

/// Runs the tracker over `frames` starting from the known position x0 at the
/// first frame's start. A miss on the first frame is an immediate loss;
/// afterwards up to cfg.max_coast consecutive misses are bridged by prediction.
TrackResult track(std::span<const Frame> frames, const Point3& x0, const TrackerConfig& cfg);

}  // namespace uavtrack
