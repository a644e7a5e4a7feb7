#include "uavtrack/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "uavtrack/errors.hpp"
#include "uavtrack/frame_integrator.hpp"

namespace uavtrack {

namespace fs = std::filesystem;

Trajectory default_trajectory() {
  return Trajectory({{{2.5, 0.0, 0.0}, 0.5},
                     {{5.0, 1.5, 0.3}, 1.0},
                     {{9.0, -2.0, 0.5}, 1.5},
                     {{14.0, 2.0, 1.0}, 2.0},
                     {{20.0, -2.0, 1.5}, 3.0},
                     {{23.0, 3.0, 1.0}, 2.0},
                     {{16.0, 5.0, 0.5}, 1.5},
                     {{10.0, 0.0, 0.2}, 1.0}},
                    0.0, 1.0);
}

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.trajectory = default_trajectory();
  return cfg;
}

void validate(const RunConfig& cfg) {
  if (cfg.methods.empty()) throw UsageError("no tracking methods configured");
  if (cfg.integration_counts.empty()) throw UsageError("no integration counts configured");
  if (cfg.seeds.empty()) throw UsageError("no seeds configured");
  for (std::size_t i : cfg.integration_counts) {
    if (i < 1) throw UsageError("integration counts must be >= 1");
  }
  if (cfg.workers < 1) throw UsageError("workers must be >= 1");
  if (!(cfg.gt_rate > 0.0)) throw UsageError("gt_rate must be > 0");
  try {
    cfg.sensor.validate();
    cfg.target.validate();
    cfg.tracker.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// ---------------------------------------------------------------------------
// Config text

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Shortest text that parses back to the same double.
std::string real_text(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
std::string join(const std::vector<T>& items, const std::function<std::string(const T&)>& f) {
  std::string out;
  for (const auto& it : items) out += (out.empty() ? "" : ", ") + f(it);
  return out;
}

class ConfigParser {
 public:
  ConfigParser(std::string name) : name_(std::move(name)) {}

  void set_line(std::size_t line) { line_ = line; }

  double real(const std::string& s) const {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
      throw ParseError(name_, line_, "invalid number '" + s + "'");
    }
    return v;
  }

  std::uint64_t integer(const std::string& s) const {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw ParseError(name_, line_, "invalid integer '" + s + "'");
    }
    return v;
  }

  bool boolean(const std::string& s) const {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ParseError(name_, line_, "expected true or false, got '" + s + "'");
  }

  std::vector<std::string> list(const std::string& s) const {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  ParseError fail(const std::string& what) const { return ParseError(name_, line_, what); }

 private:
  std::string name_;
  std::size_t line_ = 0;
};

}  // namespace

RunConfig parse_config(std::string_view text, const std::string& name) {
  RunConfig cfg = default_run_config();
  ConfigParser p(name);
  std::vector<Waypoint> waypoints;
  double start_time = cfg.trajectory.start_time();
  double hold = cfg.trajectory.hold();
  std::string section;

  std::map<std::string, std::function<void(const std::string&)>> setters{
      {"sensor.fov_az_deg", [&](const std::string& v) { cfg.sensor.fov_az_deg = p.real(v); }},
      {"sensor.fov_el_deg", [&](const std::string& v) { cfg.sensor.fov_el_deg = p.real(v); }},
      {"sensor.base_rate_hz", [&](const std::string& v) { cfg.sensor.base_rate_hz = p.real(v); }},
      {"sensor.points_per_scan",
       [&](const std::string& v) { cfg.sensor.points_per_scan = p.integer(v); }},
      {"sensor.range_noise_sigma",
       [&](const std::string& v) { cfg.sensor.range_noise_sigma = p.real(v); }},
      {"sensor.max_range", [&](const std::string& v) { cfg.sensor.max_range = p.real(v); }},
      {"sensor.rosette_omega", [&](const std::string& v) { cfg.sensor.rosette_omega = p.real(v); }},
      {"sensor.rosette_ratio", [&](const std::string& v) { cfg.sensor.rosette_ratio = p.real(v); }},
      {"sensor.rosette_primary_amplitude",
       [&](const std::string& v) { cfg.sensor.rosette_primary_amplitude = p.real(v); }},
      {"sensor.clutter_per_scan",
       [&](const std::string& v) { cfg.sensor.clutter_per_scan = p.integer(v); }},
      {"sensor.clutter_min_range",
       [&](const std::string& v) { cfg.sensor.clutter_min_range = p.real(v); }},
      {"sensor.clutter_max_range",
       [&](const std::string& v) { cfg.sensor.clutter_max_range = p.real(v); }},
      {"target.radius", [&](const std::string& v) { cfg.target.radius = p.real(v); }},
      {"target.reflectivity_dropout",
       [&](const std::string& v) { cfg.target.reflectivity_dropout = p.real(v); }},
      {"trajectory.start_time", [&](const std::string& v) { start_time = p.real(v); }},
      {"trajectory.hold", [&](const std::string& v) { hold = p.real(v); }},
      {"trajectory.waypoint",
       [&](const std::string& v) {
         std::istringstream ss(v);
         std::vector<std::string> parts;
         std::string tok;
         while (ss >> tok) parts.push_back(tok);
         if (parts.size() != 4) throw p.fail("waypoint needs 'x y z speed'");
         waypoints.push_back(
             {{p.real(parts[0]), p.real(parts[1]), p.real(parts[2])}, p.real(parts[3])});
       }},
      {"tracker.search_radius",
       [&](const std::string& v) { cfg.tracker.search_radius = p.real(v); }},
      {"tracker.sigma_a", [&](const std::string& v) { cfg.tracker.sigma_a = p.real(v); }},
      {"tracker.sigma_z", [&](const std::string& v) { cfg.tracker.sigma_z = p.real(v); }},
      {"tracker.max_coast", [&](const std::string& v) { cfg.tracker.max_coast = p.integer(v); }},
      {"tracker.scale_noise_by_support",
       [&](const std::string& v) { cfg.tracker.scale_noise_by_support = p.boolean(v); }},
      {"tracker.method", [&](const std::string& v) { cfg.tracker.method = parse_method(v); }},
      {"tracker.initial_velocity_sigma",
       [&](const std::string& v) { cfg.tracker.initial_velocity_sigma = p.real(v); }},
      {"run.methods",
       [&](const std::string& v) {
         cfg.methods.clear();
         for (const auto& m : p.list(v)) cfg.methods.push_back(parse_method(m));
       }},
      {"run.integration_counts",
       [&](const std::string& v) {
         cfg.integration_counts.clear();
         for (const auto& i : p.list(v)) cfg.integration_counts.push_back(p.integer(i));
       }},
      {"run.seeds",
       [&](const std::string& v) {
         cfg.seeds.clear();
         for (const auto& s : p.list(v)) cfg.seeds.push_back(p.integer(s));
       }},
      {"run.workers", [&](const std::string& v) { cfg.workers = p.integer(v); }},
      {"run.gt_rate", [&](const std::string& v) { cfg.gt_rate = p.real(v); }},
      {"run.output_dir", [&](const std::string& v) { cfg.output_dir = v; }},
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    p.set_line(++line_no);
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw p.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw p.fail("expected 'key = value'");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw p.fail("unknown key '" + key + "'");
    try {
      it->second(value);
    } catch (const UsageError& e) {
      throw p.fail(e.what());
    }
  }

  try {
    cfg.trajectory = Trajectory(waypoints.empty() ? cfg.trajectory.waypoints() : waypoints,
                                start_time, hold);
  } catch (const std::invalid_argument& e) {
    throw ParseError(name, line_no, e.what());
  }
  return cfg;
}

std::string render_config(const RunConfig& cfg) {
  std::ostringstream out;
  const auto kv = [&](const char* key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  const auto num = [&](const char* key, double v) { kv(key, real_text(v)); };
  const auto cnt = [&](const char* key, std::uint64_t v) { kv(key, std::to_string(v)); };

  out << "[sensor]\n";
  num("fov_az_deg", cfg.sensor.fov_az_deg);
  num("fov_el_deg", cfg.sensor.fov_el_deg);
  num("base_rate_hz", cfg.sensor.base_rate_hz);
  cnt("points_per_scan", cfg.sensor.points_per_scan);
  num("range_noise_sigma", cfg.sensor.range_noise_sigma);
  num("max_range", cfg.sensor.max_range);
  num("rosette_omega", cfg.sensor.rosette_omega);
  num("rosette_ratio", cfg.sensor.rosette_ratio);
  num("rosette_primary_amplitude", cfg.sensor.rosette_primary_amplitude);
  cnt("clutter_per_scan", cfg.sensor.clutter_per_scan);
  num("clutter_min_range", cfg.sensor.clutter_min_range);
  num("clutter_max_range", cfg.sensor.clutter_max_range);

  out << "\n[target]\n";
  num("radius", cfg.target.radius);
  num("reflectivity_dropout", cfg.target.reflectivity_dropout);

  out << "\n[trajectory]\n";
  num("start_time", cfg.trajectory.start_time());
  num("hold", cfg.trajectory.hold());
  for (const Waypoint& w : cfg.trajectory.waypoints()) {
    kv("waypoint", real_text(w.position.x()) + " " + real_text(w.position.y()) + " " +
                       real_text(w.position.z()) + " " + real_text(w.speed));
  }

  out << "\n[tracker]\n";
  num("search_radius", cfg.tracker.search_radius);
  num("sigma_a", cfg.tracker.sigma_a);
  num("sigma_z", cfg.tracker.sigma_z);
  cnt("max_coast", cfg.tracker.max_coast);
  kv("scale_noise_by_support", cfg.tracker.scale_noise_by_support ? "true" : "false");
  num("initial_velocity_sigma", cfg.tracker.initial_velocity_sigma);
  kv("method", to_string(cfg.tracker.method));

  out << "\n[run]\n";
  kv("methods", join<Method>(cfg.methods, [](const Method& m) { return to_string(m); }));
  kv("integration_counts", join<std::size_t>(cfg.integration_counts,
                                             [](const std::size_t& i) { return std::to_string(i); }));
  kv("seeds", join<std::uint64_t>(cfg.seeds, [](const std::uint64_t& s) { return std::to_string(s); }));
  cnt("workers", cfg.workers);
  num("gt_rate", cfg.gt_rate);
  if (!cfg.output_dir.empty()) kv("output_dir", cfg.output_dir);
  return out.str();
}

RunConfig load_config(const fs::path& path) {
  return parse_config(read_text_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Runs

std::vector<RunSpec> sweep_plan(const RunConfig& cfg) {
  std::vector<std::size_t> counts = cfg.integration_counts;
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());

  std::vector<RunSpec> plan;
  for (Method m : {Method::kKf, Method::kEkf, Method::kCv}) {
    if (std::find(cfg.methods.begin(), cfg.methods.end(), m) == cfg.methods.end()) continue;
    const std::vector<std::size_t> ms =
        m == Method::kCv ? std::vector<std::size_t>{counts.front()} : counts;
    for (std::size_t i : ms) {
      for (std::uint64_t seed : cfg.seeds) plan.push_back({m, i, seed});
    }
  }
  return plan;
}

RunOutcome execute_run(const RunConfig& cfg, const RunSpec& spec, std::span<const Scan> scans,
                       std::span<const TimedPoint> ground_truth) {
  RunOutcome out;
  out.spec = spec;
  try {
    const std::vector<Frame> frames = frame_stream(scans, spec.integration_count);
    if (frames.empty()) throw Error("no complete frame at I=" + std::to_string(spec.integration_count));
    TrackerConfig tc = cfg.tracker;
    tc.method = spec.method;
    out.track = track(frames, cfg.trajectory.position(frames.front().t_start), tc);
    out.status = out.track.lost_at ? "lost" : "ok";

    const std::vector<TimedPoint> est = out.track.estimates();
    if (!est.empty()) {
      const double tol = 0.5 * spec.integration_count / cfg.sensor.base_rate_hz;
      const Evaluation ev = evaluate_trajectory(est, ground_truth, tol);
      out.errors = ev.errors;
      out.report = ev.report;
    }
  } catch (const std::exception& e) {
    out.status = "failed";
    out.message = e.what();
  }
  return out;
}

namespace {

std::string aggregate_status(std::span<const RunOutcome* const> runs) {
  std::string status = "ok";
  for (const RunOutcome* r : runs) {
    if (r->status == "failed") return "failed";
    if (r->status == "lost") status = "lost";
  }
  return status;
}

}  // namespace

SweepResult run_sweep(const RunConfig& cfg) {
  validate(cfg);
  const std::vector<RunSpec> plan = sweep_plan(cfg);

  // Scans and ground truth per seed, shared read-only by that seed's runs.
  std::vector<std::vector<Scan>> scans(cfg.seeds.size());
  const std::vector<TimedPoint> gt = gen_ground_truth(cfg.trajectory, cfg.gt_rate);
  std::map<std::uint64_t, std::size_t> seed_index;
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) seed_index.emplace(cfg.seeds[i], i);

  SweepResult result;
  result.runs.resize(plan.size());
  const std::size_t workers = std::min(cfg.workers, std::max<std::size_t>(plan.size(), 1));

  const auto parallel = [&](std::size_t n, const std::function<void(std::size_t)>& job) {
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
  };

  parallel(cfg.seeds.size(), [&](std::size_t i) {
    scans[i] = simulate_run(cfg.sensor, cfg.target, cfg.trajectory, cfg.seeds[i]);
  });
  parallel(plan.size(), [&](std::size_t i) {
    const std::size_t s = seed_index.at(plan[i].seed);
    result.runs[i] = execute_run(cfg, plan[i], scans[s], gt);
  });

  // Rows in plan order; each (method, I) group closes with its aggregate.
  for (std::size_t begin = 0; begin < plan.size();) {
    std::size_t end = begin;
    while (end < plan.size() && plan[end].method == plan[begin].method &&
           plan[end].integration_count == plan[begin].integration_count) {
      ++end;
    }
    std::vector<double> pooled;
    std::vector<const RunOutcome*> group;
    std::size_t lost_frames = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const RunOutcome& run = result.runs[i];
      group.push_back(&run);
      ResultRecord rec;
      rec.row.method = to_string(run.spec.method);
      rec.row.integration_count = run.spec.integration_count;
      rec.row.report = run.report;
      rec.row.frames_lost = run.status == "failed" ? 0 : run.track.frames_lost();
      rec.seed = std::to_string(run.spec.seed);
      rec.status = run.status;
      result.any_failed = result.any_failed || run.status == "failed";
      pooled.insert(pooled.end(), run.errors.begin(), run.errors.end());
      lost_frames += rec.row.frames_lost;
      result.records.push_back(std::move(rec));
    }
    ResultRecord agg;
    agg.row.method = to_string(plan[begin].method);
    agg.row.integration_count = plan[begin].integration_count;
    if (!pooled.empty()) agg.row.report = ape_stats_from_errors(std::move(pooled));
    agg.row.frames_lost = lost_frames;
    agg.seed = "all";
    agg.status = aggregate_status(group);
    result.records.push_back(std::move(agg));
    begin = end;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

std::string run_file_name(const RunSpec& s) {
  return to_string(s.method) + "_I" + std::to_string(s.integration_count) + "_seed" +
         std::to_string(s.seed) + ".csv";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir.string() + "': " + ec.message());
}

Point3 interpolate(std::span<const TimedPoint> gt, double t) {
  const auto it = std::lower_bound(gt.begin(), gt.end(), t,
                                   [](const TimedPoint& g, double x) { return g.t < x; });
  if (it == gt.begin()) return gt.front().position;
  if (it == gt.end()) return gt.back().position;
  const TimedPoint& a = *(it - 1);
  const TimedPoint& b = *it;
  const double alpha = (t - a.t) / (b.t - a.t);
  return a.position + alpha * (b.position - a.position);
}

}  // namespace

SimulateSummary cmd_simulate(const RunConfig& cfg, const fs::path& out_dir, std::uint64_t seed) {
  validate(cfg);
  ensure_dir(out_dir);
  const std::vector<Scan> scans = simulate_run(cfg.sensor, cfg.target, cfg.trajectory, seed);
  const std::vector<TimedPoint> gt = gen_ground_truth(cfg.trajectory, cfg.gt_rate);

  std::ostringstream scan_text, gt_text;
  write_scans(scan_text, scans);
  write_ground_truth(gt_text, gt);
  write_text_file(out_dir / "scans.csv", scan_text.str());
  write_text_file(out_dir / "ground_truth.csv", gt_text.str());

  SimulateSummary summary;
  summary.scans = scans.size();
  for (const Scan& s : scans) summary.points += s.points.size();
  summary.ground_truth_samples = gt.size();
  return summary;
}

std::size_t cmd_track(const fs::path& scan_path, const fs::path& gt_path, const RunConfig& cfg,
                      Method method, std::size_t integration_count, const fs::path& out_path) {
  validate(cfg);
  if (integration_count < 1) throw UsageError("integration count must be >= 1");

  std::istringstream scan_in(read_text_file(scan_path));
  const std::vector<ScanPointRow> rows = read_scan_rows(scan_in, scan_path.string());
  std::istringstream gt_in(read_text_file(gt_path));
  const std::vector<TimedPoint> gt = read_ground_truth(gt_in, gt_path.string());
  if (gt.empty()) throw ParseError(gt_path.string(), 1, "ground truth has no samples");

  const double rate = cfg.sensor.base_rate_hz;
  std::size_t n_scans =
      static_cast<std::size_t>(std::floor((gt.back().t - gt.front().t) * rate + 1e-9));
  if (!rows.empty()) n_scans = std::max(n_scans, rows.back().scan_id + 1);
  const std::vector<Scan> scans = assemble_scans(rows, n_scans, gt.front().t, 1.0 / rate);

  const std::vector<Frame> frames = frame_stream(scans, integration_count);
  TrackerConfig tc = cfg.tracker;
  tc.method = method;
  TrackResult result;
  if (!frames.empty()) result = track(frames, interpolate(gt, frames.front().t_start), tc);

  std::ostringstream out;
  write_trajectory(out, result);
  if (out_path.has_parent_path()) ensure_dir(out_path.parent_path());
  write_text_file(out_path, out.str());
  return result.steps.size();
}

SweepResult cmd_sweep(const RunConfig& cfg, const fs::path& out_dir) {
  SweepResult result = run_sweep(cfg);
  ensure_dir(out_dir / "trajectories");
  for (const RunOutcome& run : result.runs) {
    std::ostringstream traj;
    write_trajectory(traj, run.track);
    write_text_file(out_dir / "trajectories" / run_file_name(run.spec), traj.str());
  }
  std::ostringstream res;
  write_results(res, result.records);
  write_text_file(out_dir / "results.csv", res.str());
  return result;
}

std::vector<BoxRecord> boxplot_records(std::span<const ResultRecord> results) {
  const auto rank = [](const std::string& m) {
    if (m == "kf") return 0;
    if (m == "ekf") return 1;
    if (m == "cv") return 2;
    return 3;
  };
  const bool has_seed = std::any_of(results.begin(), results.end(),
                                    [](const ResultRecord& r) { return !r.seed.empty(); });
  std::vector<BoxRecord> out;
  for (const ResultRecord& r : results) {
    if (has_seed && r.seed != "all") continue;
    BoxRecord b;
    b.method = r.row.method;
    b.integration_count = r.row.integration_count;
    b.report = r.row.report;
    std::string upper = b.method;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    b.label = b.method == "cv" ? "CV" : "I" + std::to_string(b.integration_count) + "_" + upper;
    out.push_back(std::move(b));
  }
  std::stable_sort(out.begin(), out.end(), [&](const BoxRecord& a, const BoxRecord& b) {
    const int ra = rank(a.method), rb = rank(b.method);
    if (ra != rb) return ra < rb;
    if (a.method != b.method) return a.method < b.method;
    return a.integration_count < b.integration_count;
  });
  return out;
}

std::string render_boxplot(std::span<const BoxRecord> records) {
  std::string out = std::string(kBoxplotHeader) + "\n";
  char buf[256];
  for (const BoxRecord& b : records) {
    const ApeReport& r = b.report;
    std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.4f,%.4f,%.4f,%.4f,%.4f\n", b.label.c_str(),
                  b.method.c_str(), b.integration_count, r.whisker_lo, r.q1, r.median, r.q3,
                  r.whisker_hi);
    out += buf;
  }
  return out;
}

std::size_t cmd_plotdata(const fs::path& results_path, const fs::path& out_path) {
  std::istringstream in(read_text_file(results_path));
  const std::vector<ResultRecord> results = read_results(in, results_path.string());
  const std::vector<BoxRecord> records = boxplot_records(results);
  if (out_path.has_parent_path()) ensure_dir(out_path.parent_path());
  write_text_file(out_path, render_boxplot(records));
  return records.size();
}

}  // namespace uavtrack
