// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "oracles.hpp"
#include "uavtrack/csv_io.hpp"
#include "uavtrack/evaluation.hpp"
#include "uavtrack/harness.hpp"
#include "uavtrack/kdtree.hpp"
#include "uavtrack/scan_sim.hpp"
#include "uavtrack/tracker.hpp"

namespace fs = std::filesystem;
using namespace uavtrack;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool covariance_ok(const Matrix6& p) {
  if (!p.allFinite()) return false;
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, p.cwiseAbs().maxCoeff())) return false;
  const Eigen::SelfAdjointEigenSolver<Matrix6> es(p);
  return es.eigenvalues().minCoeff() >= -1e-9 * std::max(1.0, es.eigenvalues().maxCoeff());
}

// -- 1 ----------------------------------------------------------------------

Outcome radius_search_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> log_n(3.0, 5.0), radius(0.0, 3.0), where(-12.0, 12.0);
  std::size_t mismatches = 0, queries = 0;
  for (int cloud = 0; cloud < 100; ++cloud) {
    const auto n = static_cast<std::size_t>(std::pow(10.0, log_n(rng)));
    auto pts = oracle::random_cloud(rng, n, 10.0);
    if (cloud % 10 == 0) {
      // Duplicates and planar structure.
      for (std::size_t i = 0; i < n / 4; ++i) pts[i] = pts[i / 2];
      for (std::size_t i = n / 4; i < n / 2; ++i) pts[i].z() = 0.5;
    }
    const KdTree tree = build_kdtree(pts);
    for (int q = 0; q < 20; ++q) {
      const Point3 c = q % 4 == 0 ? pts[static_cast<std::size_t>(q) * 7 % n] : Point3(where(rng), where(rng), where(rng));
      const double r = q == 1 ? 0.0 : radius(rng);
      ++queries;
      if (tree.radius_search_indices(c, r) != oracle::brute_force_radius(pts, c, r)) ++mismatches;
    }
  }
  const double secs = seconds_since(t0);
  o.require(mismatches == 0, fmt("%zu/%zu queries differ from brute force", mismatches, queries));
  o.require(secs < 10.0, fmt("took %.2f s", secs));
  if (o.pass) o.detail = fmt("%zu queries over 100 clouds identical, %.2f s", queries, secs);
  return o;
}

// -- 2 ----------------------------------------------------------------------

Outcome filter_correctness() {
  Outcome o;
  {
    UavState s;
    s.covariance = Matrix6::Identity();
    const UavState post = kf_update(s, {{2, 0, 0}, 0.0, 1}, 1.0);
    const double gain = post.position.x() / 2.0;
    o.require(std::abs(gain - 0.5) <= 1e-12 && std::abs(post.covariance(0, 0) - 0.5) <= 1e-12,
              fmt("scalar case gain %.17g var %.17g", gain, post.covariance(0, 0)));
  }
  std::mt19937_64 rng(102);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> dt(0.01, 0.5), sz(1e-4, 1.0), sa(0.1, 10.0);
  std::size_t bad_kf = 0, bad_ekf = 0;
  UavState kf = initial_state(Point3::Zero(), 0.0, TrackerConfig{});
  EkfState ekf = ekf_initial_state(Point3::Zero(), 0.0, TrackerConfig{});
  for (int i = 0; i < 10000; ++i) {
    kf = kf_predict(kf, dt(rng), sa(rng));
    bad_kf += !covariance_ok(kf.covariance);
    kf = kf_update(kf, {kf.position + Point3(n(rng), n(rng), n(rng)), kf.t, 1}, sz(rng));
    bad_kf += !covariance_ok(kf.covariance);
    ekf = ekf_predict(ekf, dt(rng), sa(rng));
    bad_ekf += !covariance_ok(ekf.covariance);
    ekf = ekf_update(ekf, {ekf.position + Point3(0.1 + n(rng), n(rng), 0.2 * n(rng)), ekf.t, 1}, sz(rng));
    bad_ekf += !covariance_ok(ekf.covariance);
  }
  o.require(bad_kf == 0, fmt("%zu KF covariances not symmetric PSD", bad_kf));
  o.require(bad_ekf == 0, fmt("%zu EKF covariances not symmetric PSD", bad_ekf));

  std::uniform_real_distribution<double> pos(-20, 20), speed(0, 5), heading(-M_PI, M_PI), pitch(-1.4, 1.4);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Vector6 x;
    x << pos(rng), pos(rng), pos(rng), speed(rng), heading(rng), pitch(rng);
    const double h = dt(rng);
    const Matrix6 num = oracle::central_difference([&](const Vector6& v) { return ekf_transition(v, h); }, x, 1e-6);
    worst = std::max(worst, (ekf_transition_jacobian(x, h) - num).cwiseAbs().maxCoeff());
  }
  o.require(worst <= 1e-5, fmt("Jacobian deviates by %.3g", worst));
  if (o.pass) o.detail = fmt("gain 0.5 exact, 4e4 covariances valid, Jacobian max dev %.2g", worst);
  return o;
}

// -- 3 ----------------------------------------------------------------------

bool reports_close(const ApeReport& a, const ApeReport& b, double tol) {
  return std::abs(a.median - b.median) <= tol && std::abs(a.q1 - b.q1) <= tol && std::abs(a.q3 - b.q3) <= tol &&
         std::abs(a.whisker_lo - b.whisker_lo) <= tol && std::abs(a.whisker_hi - b.whisker_hi) <= tol &&
         std::abs(a.mean - b.mean) <= tol && std::abs(a.rmse - b.rmse) <= tol && a.n == b.n;
}

Outcome alignment() {
  Outcome o;
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(-20, 20);
  std::normal_distribution<double> noise(0.0, 0.1);
  double worst = 0.0;
  std::size_t variant = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Matrix3d rot = oracle::random_rotation(rng);
    const Vector3 trans(u(rng), u(rng), u(rng));
    std::vector<AlignedPair> pairs;
    for (const Point3& g : oracle::random_cloud(rng, 50, 10.0)) pairs.push_back({0.0, rot.transpose() * (g - trans), g});
    const Alignment a = umeyama_align(pairs);
    worst = std::max({worst, (a.transform.rotation - rot).cwiseAbs().maxCoeff(),
                      (a.transform.translation - trans).cwiseAbs().maxCoeff()});

    std::vector<AlignedPair> noisy = pairs;
    for (auto& p : noisy) p.est = p.gt + Vector3(noise(rng), noise(rng), noise(rng));
    std::vector<AlignedPair> moved = noisy;
    const Eigen::Matrix3d r2 = oracle::random_rotation(rng);
    const Vector3 t2(u(rng), u(rng), u(rng));
    for (auto& p : moved) p.est = r2 * p.est + t2;
    const ApeReport ra = ape_stats(apply_alignment(umeyama_align(noisy).transform, noisy));
    const ApeReport rb = ape_stats(apply_alignment(umeyama_align(moved).transform, moved));
    variant += !reports_close(ra, rb, 1e-9);
  }
  o.require(worst <= 1e-9, fmt("SE(3) recovery error %.3g", worst));
  o.require(variant == 0, fmt("%zu/100 reports changed under rigid motion", variant));
  if (o.pass) o.detail = fmt("max recovery error %.2g, reports rigid-invariant", worst);
  return o;
}

// -- shared scenario runner -------------------------------------------------

struct ScenarioRun {
  double median = NAN;
  bool lost = false;
  std::size_t estimates = 0;
};

RunConfig scenario_config(const Trajectory& traj, double range_noise, double sigma_z) {
  RunConfig cfg = default_run_config();
  cfg.trajectory = traj;
  cfg.sensor.range_noise_sigma = range_noise;
  cfg.tracker.sigma_z = sigma_z;
  return cfg;
}

// Simulates once per seed and runs every (method, I) on the same scans.
std::vector<std::vector<ScenarioRun>> run_scenario(const RunConfig& cfg, const std::vector<RunSpec>& specs,
                                                   int seeds) {
  std::vector<std::vector<ScenarioRun>> out(specs.size());
  const auto gt = gen_ground_truth(cfg.trajectory, cfg.gt_rate);
  for (int s = 0; s < seeds; ++s) {
    const auto scans = simulate_run(cfg.sensor, cfg.target, cfg.trajectory, 1000 + static_cast<std::uint64_t>(s));
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const RunOutcome r = execute_run(cfg, specs[i], scans, gt);
      ScenarioRun sr;
      sr.lost = r.status != "ok";
      sr.estimates = r.report.n;
      if (r.report.n > 0) sr.median = r.report.median;
      out[i].push_back(sr);
    }
  }
  return out;
}

// -- 4 ----------------------------------------------------------------------

Outcome noise_floor() {
  Outcome o;
  const auto t0 = Clock::now();
  const Vector3 dir = Vector3(1.0, 0.05, 0.02).normalized();
  const RunConfig cfg = scenario_config(Trajectory({{2.0 * dir, 1.0}, {20.0 * dir, 1.0}}), 0.01, 0.01);
  const auto runs = run_scenario(cfg, {{Method::kKf, 2, 0}}, 10)[0];
  double worst = 0.0;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    o.require(runs[s].median < 0.05, fmt("seed %zu median %.4f", s, runs[s].median));
    if (!std::isnan(runs[s].median)) worst = std::max(worst, runs[s].median);
  }
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, fmt("took %.1f s", secs));
  if (o.pass) o.detail = fmt("worst seed median %.4f m over 10 seeds, %.1f s", worst, secs);
  return o;
}

// -- 5 ----------------------------------------------------------------------

// Constant 2 m/s along a slalom at 5-17 m: piecewise constant velocity with
// moderate heading changes.
Trajectory near_constant_velocity() {
  return Trajectory({{{5.0, -3.0, 0.0}, 2.0},
                     {{8.0, -1.0, 0.2}, 2.0},
                     {{10.0, -2.5, 0.4}, 2.0},
                     {{13.0, 0.0, 0.3}, 2.0},
                     {{15.0, -1.0, 0.5}, 2.0},
                     {{17.0, 1.5, 0.5}, 2.0}});
}

Outcome qualitative_ordering() {
  Outcome o;
  const RunConfig cfg = scenario_config(near_constant_velocity(), 0.02, TrackerConfig{}.sigma_z);
  const std::vector<RunSpec> specs = {
      {Method::kKf, 2, 0}, {Method::kCv, 2, 0}, {Method::kKf, 10, 0}, {Method::kKf, 20, 0}, {Method::kKf, 50, 0}};
  const auto runs = run_scenario(cfg, specs, 10);
  const auto wins = [&](std::size_t other) {
    int n = 0;
    for (std::size_t s = 0; s < runs[0].size(); ++s) n += runs[0][s].median < runs[other][s].median;
    return n;
  };
  const char* names[] = {"KF I=2", "CV", "KF I=10", "KF I=20", "KF I=50"};
  std::string summary;
  for (std::size_t i = 1; i < specs.size(); ++i) {
    const int w = wins(i);
    o.require(w >= 8, fmt("KF I=2 beats %s on %d/10 seeds", names[i], w));
    summary += fmt("%s%s %d/10", summary.empty() ? "" : ", ", names[i], w);
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    std::vector<double> m;
    for (const auto& r : runs[i]) m.push_back(r.median);
    std::sort(m.begin(), m.end());
    std::printf("    %-8s median-of-seed-medians %.4f m\n", names[i], m[m.size() / 2]);
  }
  if (o.pass) o.detail = "KF I=2 beats " + summary;
  return o;
}

// -- 6 ----------------------------------------------------------------------

// Zigzag at 8-11 m, 2 m/s, with turns of 100-150 degrees.
Trajectory sharp_turns() {
  return Trajectory({{{8.0, -2.0, 0.0}, 2.0},
                     {{10.5, 1.0, 0.3}, 2.0},
                     {{8.0, 2.5, 0.0}, 2.0},
                     {{11.0, -1.0, 0.4}, 2.0},
                     {{8.5, -2.5, 0.1}, 2.0},
                     {{9.5, 2.0, 0.2}, 2.0}});
}

Outcome robustness() {
  Outcome o;
  const RunConfig cfg = scenario_config(sharp_turns(), 0.01, TrackerConfig{}.sigma_z);
  const std::vector<RunSpec> specs = {{Method::kKf, 2, 0}, {Method::kKf, 50, 0}, {Method::kCv, 2, 0}};
  const auto runs = run_scenario(cfg, specs, 10);
  const auto losses = [&](std::size_t i) {
    return static_cast<int>(std::count_if(runs[i].begin(), runs[i].end(), [](const ScenarioRun& r) { return r.lost; }));
  };
  const int kf2 = losses(0), kf50 = losses(1), cv = losses(2);
  o.require(kf50 >= kf2, fmt("KF loss rate I=50 %d/10 < I=2 %d/10", kf50, kf2));
  o.require(10 - cv >= 8, fmt("CV completed %d/10 seeds", 10 - cv));
  if (o.pass) o.detail = fmt("KF lost I=2 %d/10, I=50 %d/10; CV completed %d/10", kf2, kf50, 10 - cv);
  return o;
}

// -- 7 ----------------------------------------------------------------------

Outcome coverage() {
  Outcome o;
  const SensorModel sensor;
  std::vector<Vector3> dirs;
  std::vector<std::size_t> cov;
  std::size_t scans_done = 0;
  std::string summary;
  for (std::size_t I : {1, 2, 5, 10, 20, 50}) {
    for (; scans_done < I; ++scans_done) {
      for (const PatternRay& r : gen_pattern(sensor, static_cast<double>(scans_done) * sensor.scan_period())) {
        dirs.push_back(r.direction);
      }
    }
    cov.push_back(angular_coverage(sensor, dirs));
    summary += fmt("%sI=%zu:%zu", summary.empty() ? "" : " ", I, cov.back());
  }
  o.require(std::is_sorted(cov.begin(), cov.end()), "coverage not monotone: " + summary);
  o.require(cov.back() >= 3 * cov.front(), "50-scan coverage below 3x single scan: " + summary);
  if (o.pass) o.detail = "cells " + summary + fmt(" (%.1fx)", static_cast<double>(cov.back()) / cov.front());
  return o;
}

// -- 8 ----------------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / fmt("uavtrack_acceptance_%lld",
                                                        static_cast<long long>(Clock::now().time_since_epoch().count()));
  const RunConfig cfg = default_run_config();
  cmd_sweep(cfg, root / "a");
  cmd_sweep(cfg, root / "b");
  const std::string a = read_text_file(root / "a" / "results.csv");
  const std::string b = read_text_file(root / "b" / "results.csv");
  fs::remove_all(root);
  o.require(a == b, "results files differ");
  o.require(!a.empty(), "empty results file");
  if (o.pass) o.detail = fmt("%zu-byte results files identical", a.size());
  return o;
}

}  // namespace

// Optional arguments select criteria by number, e.g. `uavtrack_acceptance 4 5`.
int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 radius search equals brute force", radius_search_oracle},
      {"2 filter correctness", filter_correctness},
      {"3 alignment recovery and rigid invariance", alignment},
      {"4 straight-line noise floor", noise_floor},
      {"5 qualitative method ordering", qualitative_ordering},
      {"6 integration vs robustness trade-off", robustness},
      {"7 multi-scan coverage", coverage},
      {"8 sweep determinism", determinism},
  };
  std::vector<bool> selected(criteria.size(), argc == 1);
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 2;
    }
    selected[static_cast<std::size_t>(k - 1)] = true;
  }
  int failed = 0, ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    const Criterion& c = criteria[i];
    ++ran;
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s  [%s] %s\n", out.pass ? "PASS" : "FAIL", c.name, out.detail.c_str());
    std::fflush(stdout);
    failed += !out.pass;
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
