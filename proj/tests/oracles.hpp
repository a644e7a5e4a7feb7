#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the code under test.

#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace uavtrack::oracle {

/// Indices of points with ||p - c|| <= r by exhaustive scan.
inline std::vector<std::size_t> brute_force_radius(const std::vector<Eigen::Vector3d>& pts,
                                                   const Eigen::Vector3d& c, double r) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dx = pts[i][0] - c[0];
    const double dy = pts[i][1] - c[1];
    const double dz = pts[i][2] - c[2];
    if (dx * dx + dy * dy + dz * dz <= r * r) out.push_back(i);
  }
  return out;
}

/// Neumaier-compensated mean, per component.
inline Eigen::Vector3d compensated_mean(const std::vector<Eigen::Vector3d>& pts) {
  Eigen::Vector3d out;
  for (int a = 0; a < 3; ++a) {
    double sum = 0.0, comp = 0.0;
    for (const auto& p : pts) {
      const double v = p[a];
      const double t = sum + v;
      comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
      sum = t;
    }
    out[a] = (sum + comp) / static_cast<double>(pts.size());
  }
  return out;
}

using Mat6 = std::array<std::array<double, 6>, 6>;

inline Mat6 to_array(const Eigen::Matrix<double, 6, 6>& m) {
  Mat6 a{};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a[i][j] = m(i, j);
  return a;
}

inline Mat6 mul(const Mat6& a, const Mat6& b) {
  Mat6 c{};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double s = 0.0;
      for (int k = 0; k < 6; ++k) s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
  return c;
}

inline Mat6 transpose(const Mat6& a) {
  Mat6 t{};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) t[i][j] = a[j][i];
  return t;
}

/// F P F^T + Q for the CV model, with F and Q written out element by element.
inline Mat6 cv_propagate(const Mat6& p, double dt, double sigma_a) {
  Mat6 f{};
  for (int i = 0; i < 6; ++i) f[i][i] = 1.0;
  for (int i = 0; i < 3; ++i) f[i][i + 3] = dt;
  Mat6 q{};
  const double s2 = sigma_a * sigma_a;
  for (int i = 0; i < 3; ++i) {
    q[i][i] = s2 * std::pow(dt, 4) / 4.0;
    q[i][i + 3] = s2 * std::pow(dt, 3) / 2.0;
    q[i + 3][i] = s2 * std::pow(dt, 3) / 2.0;
    q[i + 3][i + 3] = s2 * dt * dt;
  }
  Mat6 out = mul(mul(f, p), transpose(f));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) out[i][j] += q[i][j];
  return out;
}

/// Central-difference Jacobian of f at x.
template <class F>
Eigen::Matrix<double, 6, 6> central_difference(F f, const Eigen::Matrix<double, 6, 1>& x,
                                               double h) {
  Eigen::Matrix<double, 6, 6> j;
  for (int c = 0; c < 6; ++c) {
    Eigen::Matrix<double, 6, 1> xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    j.col(c) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

/// Near intersection range of a unit ray from the origin with a sphere, or -1.
inline double ray_sphere_range(const Eigen::Vector3d& dir, const Eigen::Vector3d& center,
                               double radius) {
  // Solve |s d - c|^2 = r^2 for the smaller positive s.
  const double a = dir.dot(dir);
  const double b = -2.0 * dir.dot(center);
  const double c = center.dot(center) - radius * radius;
  const double disc = b * b - 4 * a * c;
  if (disc < 0) return -1.0;
  return (-b - std::sqrt(disc)) / (2 * a);
}

inline std::vector<Eigen::Vector3d> random_cloud(std::mt19937_64& rng, std::size_t n, double half) {
  std::uniform_real_distribution<double> u(-half, half);
  std::vector<Eigen::Vector3d> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  return pts;
}

/// Rotation from a random unit quaternion.
inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector4d q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Eigen::Matrix3d r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
      2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
      2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
  return r;
}

}  // namespace uavtrack::oracle
