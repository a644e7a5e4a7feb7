#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace uavtrack {

using Point3 = Eigen::Vector3d;
using Vector3 = Eigen::Vector3d;

/// A position sample with its acquisition time (seconds).
struct TimedPoint {
  Point3 position = Point3::Zero();
  double t = 0.0;

  bool operator==(const TimedPoint&) const = default;
};

bool is_finite(const Point3& p);

/// Euclidean ball membership, boundary included.
inline bool within_radius(const Point3& p, const Point3& center, double radius) {
  const double dx = p.x() - center.x();
  const double dy = p.y() - center.y();
  const double dz = p.z() - center.z();
  return dx * dx + dy * dy + dz * dz <= radius * radius;
}

/// Component-wise arithmetic mean. Throws EmptySetError on an empty input.
Point3 centroid(std::span<const Point3> points);

std::vector<Point3> positions_of(std::span<const TimedPoint> points);

}  // namespace uavtrack
