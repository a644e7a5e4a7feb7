#include "uavtrack/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "uavtrack/errors.hpp"

namespace uavtrack {

namespace {

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

// Reads the header line and yields (line number, fields) for every non-empty row.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {
    std::string header;
    if (!std::getline(in_, header)) throw ParseError(name_, 1, "missing header");
    line_ = 1;
    header_ = split(strip_cr(header));
  }

  const std::vector<std::string>& header() const { return header_; }

  void expect_header(const char* expected) const {
    if (header_ != split(expected)) {
      throw ParseError(name_, 1, std::string("expected header '") + expected + "'");
    }
  }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      line = strip_cr(line);
      if (line.empty()) continue;
      fields = split(line);
      return true;
    }
    return false;
  }

  void require_fields(const std::vector<std::string>& fields, std::size_t n) const {
    if (fields.size() != n) {
      throw fail("expected " + std::to_string(n) + " fields, found " +
                 std::to_string(fields.size()));
    }
  }

  double real(const std::string& s) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw fail("invalid number '" + s + "'");
    return v;
  }

  double finite(const std::string& s) const {
    const double v = real(s);
    if (!std::isfinite(v)) throw fail("non-finite value '" + s + "'");
    return v;
  }

  std::size_t index(const std::string& s) const {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw fail("invalid integer '" + s + "'");
    return v;
  }

  ParseError fail(const std::string& what) const { return ParseError(name_, line_, what); }
  const std::string& name() const { return name_; }

 private:
  std::istream& in_;
  std::string name_;
  std::size_t line_ = 0;
  std::vector<std::string> header_;
};

}  // namespace

void write_scans(std::ostream& out, std::span<const Scan> scans) {
  out << kScanHeader << '\n';
  for (const Scan& s : scans) {
    for (const TimedPoint& p : s.points) {
      out << s.scan_id << ',' << fmt9(p.t) << ',' << fmt9(p.position.x()) << ','
          << fmt9(p.position.y()) << ',' << fmt9(p.position.z()) << '\n';
    }
  }
}

std::vector<ScanPointRow> read_scan_rows(std::istream& in, const std::string& name) {
  CsvReader reader(in, name);
  reader.expect_header(kScanHeader);
  std::vector<ScanPointRow> rows;
  std::vector<std::string> f;
  while (reader.next(f)) {
    reader.require_fields(f, 5);
    ScanPointRow row;
    row.scan_id = reader.index(f[0]);
    row.point.t = reader.finite(f[1]);
    row.point.position = {reader.finite(f[2]), reader.finite(f[3]), reader.finite(f[4])};
    if (!rows.empty() && row.scan_id < rows.back().scan_id) {
      throw reader.fail("scan ids must be non-decreasing");
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<Scan> assemble_scans(std::span<const ScanPointRow> rows, std::size_t n_scans,
                                 double start_time, double period) {
  std::vector<Scan> scans(n_scans);
  for (std::size_t i = 0; i < n_scans; ++i) {
    scans[i].scan_id = i;
    scans[i].t_start = start_time + static_cast<double>(i) * period;
    scans[i].t_end = scans[i].t_start + period;
  }
  for (const ScanPointRow& r : rows) {
    if (r.scan_id >= n_scans) {
      throw Error("scan id " + std::to_string(r.scan_id) + " beyond the " +
                  std::to_string(n_scans) + " scans covered by the ground truth");
    }
    scans[r.scan_id].points.push_back(r.point);
  }
  return scans;
}

void write_ground_truth(std::ostream& out, std::span<const TimedPoint> gt) {
  out << kGroundTruthHeader << '\n';
  for (const TimedPoint& p : gt) {
    out << fmt9(p.t) << ',' << fmt9(p.position.x()) << ',' << fmt9(p.position.y()) << ','
        << fmt9(p.position.z()) << '\n';
  }
}

std::vector<TimedPoint> read_ground_truth(std::istream& in, const std::string& name) {
  CsvReader reader(in, name);
  reader.expect_header(kGroundTruthHeader);
  std::vector<TimedPoint> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    reader.require_fields(f, 4);
    TimedPoint p;
    p.t = reader.finite(f[0]);
    p.position = {reader.finite(f[1]), reader.finite(f[2]), reader.finite(f[3])};
    if (!out.empty() && !(p.t > out.back().t)) {
      throw reader.fail("ground-truth timestamps must be strictly increasing");
    }
    out.push_back(p);
  }
  return out;
}

void write_trajectory(std::ostream& out, const TrackResult& result) {
  out << kTrajectoryHeader << '\n';
  for (const TrackStep& s : result.steps) {
    const UavState& st = s.state;
    out << fmt9(st.t) << ',' << fmt9(st.position.x()) << ',' << fmt9(st.position.y()) << ','
        << fmt9(st.position.z()) << ',' << fmt9(st.velocity.x()) << ',' << fmt9(st.velocity.y())
        << ',' << fmt9(st.velocity.z()) << ',' << to_string(s.status) << '\n';
  }
}

std::vector<TrajectoryRow> read_trajectory(std::istream& in, const std::string& name) {
  CsvReader reader(in, name);
  reader.expect_header(kTrajectoryHeader);
  std::vector<TrajectoryRow> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    reader.require_fields(f, 8);
    TrajectoryRow r;
    r.t = reader.finite(f[0]);
    r.position = {reader.finite(f[1]), reader.finite(f[2]), reader.finite(f[3])};
    r.velocity = {reader.finite(f[4]), reader.finite(f[5]), reader.finite(f[6])};
    try {
      r.status = parse_status(f[7]);
    } catch (const std::invalid_argument& e) {
      throw reader.fail(e.what());
    }
    out.push_back(r);
  }
  return out;
}

void write_frames(std::ostream& out, std::span<const Frame> frames) {
  out << kFrameHeader << '\n';
  for (const Frame& fr : frames) {
    for (std::size_t s = 0; s < fr.scan_ids.size(); ++s) {
      const std::size_t end = s + 1 < fr.scan_offsets.size() ? fr.scan_offsets[s + 1] : fr.points.size();
      for (std::size_t i = fr.scan_offsets[s]; i < end; ++i) {
        const TimedPoint& p = fr.points[i];
        out << fr.k << ',' << fr.scan_ids[s] << ',' << fmt9(p.t) << ',' << fmt9(p.position.x())
            << ',' << fmt9(p.position.y()) << ',' << fmt9(p.position.z()) << '\n';
      }
    }
  }
}

void write_results(std::ostream& out, std::span<const ResultRecord> records) {
  out << kResultsHeader << ",seed,status\n";
  for (const ResultRecord& r : records) {
    out << format_result_row(r.row) << ',' << r.seed << ',' << r.status << '\n';
  }
}

std::vector<ResultRecord> read_results(std::istream& in, const std::string& name) {
  CsvReader reader(in, name);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < reader.header().size(); ++i) col[reader.header()[i]] = i;
  std::vector<std::string> missing;
  for (const std::string& c : split(kResultsHeader)) {
    if (!col.contains(c)) missing.push_back(c);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ParseError(name, 1, "missing column(s): " + list);
  }

  std::vector<ResultRecord> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    reader.require_fields(f, reader.header().size());
    ResultRecord r;
    r.row.method = f[col["method"]];
    r.row.integration_count = reader.index(f[col["I"]]);
    ApeReport& rep = r.row.report;
    rep.n = reader.index(f[col["n"]]);
    rep.median = reader.real(f[col["ape_median"]]);
    rep.q1 = reader.real(f[col["q1"]]);
    rep.q3 = reader.real(f[col["q3"]]);
    rep.whisker_lo = reader.real(f[col["whisker_lo"]]);
    rep.whisker_hi = reader.real(f[col["whisker_hi"]]);
    rep.mean = reader.real(f[col["mean"]]);
    rep.rmse = reader.real(f[col["rmse"]]);
    r.row.frames_lost = reader.index(f[col["frames_lost"]]);
    if (col.contains("seed")) r.seed = f[col["seed"]];
    if (col.contains("status")) r.status = f[col["status"]];
    out.push_back(std::move(r));
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace uavtrack
