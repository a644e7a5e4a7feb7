#include "uavtrack/geometry.hpp"

#include "uavtrack/errors.hpp"

namespace uavtrack {

bool is_finite(const Point3& p) { return p.allFinite(); }

Point3 centroid(std::span<const Point3> points) {
  if (points.empty()) throw EmptySetError();
  Point3 sum = Point3::Zero();
  for (const auto& p : points) sum += p;
  return sum / static_cast<double>(points.size());
}

std::vector<Point3> positions_of(std::span<const TimedPoint> points) {
  std::vector<Point3> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.position);
  return out;
}

}  // namespace uavtrack
