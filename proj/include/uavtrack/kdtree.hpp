#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uavtrack/geometry.hpp"

namespace uavtrack {

/// Static 3-d tree for exact radius queries.
///
/// Nodes split at the median along the axis of widest spread (ties go to the
/// lowest axis index). Ranges of at most kLeafSize points, or whose points are
/// all identical, become leaves. The tree is immutable once built, so
/// concurrent queries are safe.
class KdTree {
 public:
  static constexpr std::size_t kLeafSize = 16;

  KdTree() = default;
  explicit KdTree(std::vector<Point3> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Point3>& points() const { return points_; }

  /// Number of node levels; 0 for an empty tree.
  std::size_t depth() const;

  /// Indices (into points()) of every point with ||p - center|| <= radius,
  /// in ascending order.
  std::vector<std::size_t> radius_search_indices(const Point3& center, double radius) const;

  /// Points with ||p - center|| <= radius, in build order.
  std::vector<Point3> radius_search(const Point3& center, double radius) const;

 private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Point3& center, double radius,
              std::vector<std::size_t>& out) const;
  std::size_t depth_of(std::int32_t node) const;

  std::vector<Point3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

KdTree build_kdtree(std::span<const Point3> points);

std::vector<Point3> radius_search(const KdTree& tree, const Point3& center, double radius);

}  // namespace uavtrack
