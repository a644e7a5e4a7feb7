#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "uavtrack/geometry.hpp"

namespace uavtrack {

struct AlignedPair {
  double t = 0.0;
  Point3 est = Point3::Zero();
  Point3 gt = Point3::Zero();
};

struct Association {
  std::vector<AlignedPair> pairs;
  std::size_t dropped = 0;
};

/// Matches every estimate to the ground-truth sample nearest in time, keeping
/// the match when |t_est - t_gt| <= tol. Both inputs must be sorted by time.
/// Throws EmptyOverlapError when nothing matches.
Association associate(std::span<const TimedPoint> est, std::span<const TimedPoint> gt, double tol);

struct Se3Transform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Point3 apply(const Point3& p) const { return rotation * p + translation; }
  Se3Transform inverse() const;
};

struct Alignment {
  Se3Transform transform;
  bool degenerate = false;  // collinear or too few pairs: translation only
};

/// Least-squares rigid transform (no scale) taking est onto gt.
Alignment umeyama_align(std::span<const AlignedPair> pairs);

/// Pairs with est replaced by transform.apply(est).
std::vector<AlignedPair> apply_alignment(const Se3Transform& transform,
                                         std::span<const AlignedPair> pairs);

struct ApeReport {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  double mean = 0.0;
  double rmse = 0.0;
  std::size_t n = 0;
  bool alignment_degenerate = false;
};

/// Linear-interpolation quantile of sorted data (h = (n - 1) p).
double quantile_sorted(std::span<const double> sorted, double p);

/// ||est - gt|| per pair.
std::vector<double> position_errors(std::span<const AlignedPair> pairs);

/// Box statistics with Tukey whiskers (furthest sample within 1.5 IQR of the box).
ApeReport ape_stats_from_errors(std::vector<double> errors);
ApeReport ape_stats(std::span<const AlignedPair> pairs);

struct Evaluation {
  ApeReport report;
  std::vector<double> errors;
  std::size_t dropped = 0;
};

/// associate -> umeyama_align -> ape_stats.
Evaluation evaluate_trajectory(std::span<const TimedPoint> est, std::span<const TimedPoint> gt,
                               double tol);

// Results table ------------------------------------------------------------

inline constexpr const char* kResultsHeader =
    "method,I,n,ape_median,q1,q3,whisker_lo,whisker_hi,mean,rmse,frames_lost";

struct ResultRow {
  std::string method;
  std::size_t integration_count = 0;
  ApeReport report;
  std::size_t frames_lost = 0;
};

/// One results line, meters at 4 decimals. Empty statistics (n == 0) print as "nan".
std::string format_result_row(const ResultRow& row);

}  // namespace uavtrack
