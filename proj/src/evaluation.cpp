#include "uavtrack/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <Eigen/Dense>

#include "uavtrack/errors.hpp"

namespace uavtrack {

Association associate(std::span<const TimedPoint> est, std::span<const TimedPoint> gt,
                      double tol) {
  Association out;
  for (const TimedPoint& e : est) {
    const auto it = std::lower_bound(gt.begin(), gt.end(), e.t,
                                     [](const TimedPoint& g, double t) { return g.t < t; });
    const TimedPoint* best = nullptr;
    if (it != gt.end()) best = &*it;
    if (it != gt.begin()) {
      const TimedPoint* before = &*(it - 1);
      if (best == nullptr || std::abs(before->t - e.t) <= std::abs(best->t - e.t)) best = before;
    }
    if (best != nullptr && std::abs(best->t - e.t) <= tol) {
      out.pairs.push_back({e.t, e.position, best->position});
    } else {
      ++out.dropped;
    }
  }
  if (out.pairs.empty()) {
    throw EmptyOverlapError("no estimate lies within " + std::to_string(tol) +
                            " s of a ground-truth sample");
  }
  return out;
}

Se3Transform Se3Transform::inverse() const {
  Se3Transform inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

Alignment umeyama_align(std::span<const AlignedPair> pairs) {
  if (pairs.empty()) throw std::invalid_argument("umeyama_align: no pairs");
  const double n = static_cast<double>(pairs.size());
  Eigen::Vector3d mu_est = Eigen::Vector3d::Zero();
  Eigen::Vector3d mu_gt = Eigen::Vector3d::Zero();
  for (const auto& p : pairs) {
    mu_est += p.est;
    mu_gt += p.gt;
  }
  mu_est /= n;
  mu_gt /= n;

  Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const auto& p : pairs) {
    const Eigen::Vector3d de = p.est - mu_est;
    cross += (p.gt - mu_gt) * de.transpose();
    scatter += de * de.transpose();
  }
  cross /= n;
  scatter /= n;

  Alignment out;
  // A unique rotation needs the estimate to span at least a plane.
  const Eigen::Vector3d spread = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(scatter).eigenvalues();
  if (pairs.size() < 3 || !(spread(1) > 1e-12 * std::max(spread(2), 1e-300))) {
    out.degenerate = true;
    out.transform.translation = mu_gt - mu_est;
    return out;
  }

  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d s = Eigen::Matrix3d::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) s(2, 2) = -1.0;
  out.transform.rotation = svd.matrixU() * s * svd.matrixV().transpose();
  out.transform.translation = mu_gt - out.transform.rotation * mu_est;
  return out;
}

std::vector<AlignedPair> apply_alignment(const Se3Transform& transform,
                                         std::span<const AlignedPair> pairs) {
  std::vector<AlignedPair> out(pairs.begin(), pairs.end());
  for (auto& p : out) p.est = transform.apply(p.est);
  return out;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> position_errors(std::span<const AlignedPair> pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back((p.est - p.gt).norm());
  return out;
}

ApeReport ape_stats_from_errors(std::vector<double> errors) {
  if (errors.empty()) throw std::invalid_argument("ape_stats: no samples");
  std::sort(errors.begin(), errors.end());
  ApeReport r;
  r.n = errors.size();
  r.q1 = quantile_sorted(errors, 0.25);
  r.median = quantile_sorted(errors, 0.5);
  r.q3 = quantile_sorted(errors, 0.75);
  const double iqr = r.q3 - r.q1;
  const double lo_fence = r.q1 - 1.5 * iqr;
  const double hi_fence = r.q3 + 1.5 * iqr;
  r.whisker_lo = *std::lower_bound(errors.begin(), errors.end(), lo_fence);
  r.whisker_hi = *(std::upper_bound(errors.begin(), errors.end(), hi_fence) - 1);
  double sum = 0.0, sum_sq = 0.0;
  for (double e : errors) {
    sum += e;
    sum_sq += e * e;
  }
  r.mean = sum / static_cast<double>(r.n);
  r.rmse = std::sqrt(sum_sq / static_cast<double>(r.n));
  return r;
}

ApeReport ape_stats(std::span<const AlignedPair> pairs) {
  return ape_stats_from_errors(position_errors(pairs));
}

Evaluation evaluate_trajectory(std::span<const TimedPoint> est, std::span<const TimedPoint> gt,
                               double tol) {
  const Association assoc = associate(est, gt, tol);
  const Alignment align = umeyama_align(assoc.pairs);
  Evaluation out;
  out.errors = position_errors(apply_alignment(align.transform, assoc.pairs));
  out.report = ape_stats_from_errors(out.errors);
  out.report.alignment_degenerate = align.degenerate;
  out.dropped = assoc.dropped;
  return out;
}

std::string format_result_row(const ResultRow& row) {
  const ApeReport& r = row.report;
  char buf[512];
  if (r.n == 0) {
    std::snprintf(buf, sizeof buf, "%s,%zu,0,nan,nan,nan,nan,nan,nan,nan,%zu", row.method.c_str(),
                  row.integration_count, row.frames_lost);
  } else {
    std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%zu",
                  row.method.c_str(), row.integration_count, r.n, r.median, r.q1, r.q3,
                  r.whisker_lo, r.whisker_hi, r.mean, r.rmse, row.frames_lost);
  }
  return buf;
}

}  // namespace uavtrack
