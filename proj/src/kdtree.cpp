#include "uavtrack/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace uavtrack {

KdTree::KdTree(std::vector<Point3> points) : points_(std::move(points)) {
  if (points_.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::length_error("KdTree: too many points");
  }
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points_.empty()) {
    nodes_.reserve(2 * (points_.size() / kLeafSize + 1));
    build(0, static_cast<std::uint32_t>(points_.size()));
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end, -1, -1, -1, 0.0});
  if (end - begin <= kLeafSize) return id;

  Point3 lo = points_[order_[begin]];
  Point3 hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  const Point3 spread = hi - lo;
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (spread[a] > spread[axis]) axis = a;
  }
  if (spread[axis] <= 0.0) return id;  // all points coincide

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  const double split = points_[order_[mid]][axis];
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  Node& node = nodes_[static_cast<std::size_t>(id)];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void KdTree::search(std::int32_t id, const Point3& center, double radius,
                    std::vector<std::size_t>& out) const {
  const Node& node = nodes_[static_cast<std::size_t>(id)];
  if (node.axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      if (within_radius(points_[order_[i]], center, radius)) out.push_back(order_[i]);
    }
    return;
  }
  // Left holds coordinates <= split, right holds coordinates >= split.
  const double c = center[node.axis];
  if (c - radius <= node.split) search(node.left, center, radius, out);
  if (c + radius >= node.split) search(node.right, center, radius, out);
}

std::vector<std::size_t> KdTree::radius_search_indices(const Point3& center,
                                                       double radius) const {
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("radius_search: radius must be finite and >= 0");
  }
  std::vector<std::size_t> out;
  if (nodes_.empty()) return out;
  search(0, center, radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Point3> KdTree::radius_search(const Point3& center, double radius) const {
  std::vector<Point3> out;
  for (std::size_t i : radius_search_indices(center, radius)) out.push_back(points_[i]);
  return out;
}

std::size_t KdTree::depth_of(std::int32_t id) const {
  const Node& node = nodes_[static_cast<std::size_t>(id)];
  if (node.axis < 0) return 1;
  return 1 + std::max(depth_of(node.left), depth_of(node.right));
}

std::size_t KdTree::depth() const { return nodes_.empty() ? 0 : depth_of(0); }

KdTree build_kdtree(std::span<const Point3> points) {
  return KdTree(std::vector<Point3>(points.begin(), points.end()));
}

std::vector<Point3> radius_search(const KdTree& tree, const Point3& center, double radius) {
  return tree.radius_search(center, radius);
}

}  // namespace uavtrack
