#include "levycov/csv.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace levycov {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void CsvWriter::timestamp_line() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  os_ << "# generated " << buf << '\n';
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
  for (auto n : names) field(n);
  end_row();
}

void CsvWriter::sep() {
  if (row_started_) os_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::field(double v) {
  sep();
  os_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view v) {
  sep();
  os_ << v;
  return *this;
}

CsvWriter& CsvWriter::field(bool v) {
  sep();
  os_ << (v ? 1 : 0);
  return *this;
}

void CsvWriter::end_row() {
  os_ << '\n';
  row_started_ = false;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("csv: no column named " + std::string(name));
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("csv: not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

CsvTable parse_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cells = split_line(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw std::invalid_argument("csv: row width " + std::to_string(cells.size()) +
                                  " does not match header width " +
                                  std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw std::invalid_argument("csv: missing header row");
  return t;
}

void write_increments_csv(std::ostream& os, const IncrementSample& sample, bool timestamp) {
  CsvWriter w(os);
  if (timestamp) w.timestamp_line();
  w.header({"dx1", "dx2"});
  for (const auto& x : sample.increments) {
    w.field(x[0]).field(x[1]);
    w.end_row();
  }
}

IncrementSample read_increments_csv(std::istream& is) {
  const CsvTable t = parse_csv(is);
  const std::size_t c1 = t.column("dx1");
  const std::size_t c2 = t.column("dx2");
  IncrementSample s;
  s.increments.reserve(t.rows.size());
  for (const auto& row : t.rows) s.increments.push_back({parse_double(row[c1]), parse_double(row[c2])});
  if (s.increments.size() < 2) throw std::invalid_argument("increments csv: need at least two rows");
  s.mesh = 1.0 / static_cast<double>(s.increments.size());
  return s;
}

IncrementSample read_increments_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return read_increments_csv(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_cf_curve_csv(std::ostream& os, const IncrementSample& sample,
                        std::span<const double> grid, bool timestamp) {
  CsvWriter w(os);
  if (timestamp) w.timestamp_line();
  w.header({"U", "re", "im", "modulus", "orientation"});
  for (Orientation o : {Orientation::Diag, Orientation::AntiDiag}) {
    const ProjectedSample proj(sample, o);
    for (double u : grid) {
      const CfValue v = proj.ecf(u);
      w.field(u).field(v.value.real()).field(v.value.imag()).field(v.modulus).field(to_string(o));
      w.end_row();
    }
  }
}

void write_estimate_curve_csv(std::ostream& os, std::span<const CovEstimate> estimates,
                              const BoundCurves& curves, bool timestamp) {
  if (estimates.size() != curves.grid.size()) {
    throw std::invalid_argument("estimate csv: estimates and bound curves differ in length");
  }
  CsvWriter w(os);
  if (timestamp) w.timestamp_line();
  w.header({"U", "estimate", "s_theo", "s_emp", "s_env", "d", "degenerate"});
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    w.field(curves.grid[i]).field(estimates[i].value);
    if (curves.s_theo.empty()) {
      w.field(std::string_view{});
    } else {
      w.field(curves.s_theo[i]);
    }
    w.field(curves.s_emp[i]).field(curves.s_env[i]).field(curves.d[i]).field(estimates[i].degenerate);
    w.end_row();
  }
}

void write_trace_csv(std::ostream& os, const SelectionResult& selection, bool timestamp) {
  CsvWriter w(os);
  if (timestamp) w.timestamp_line();
  w.header({"method", "j", "k", "distance", "threshold", "passed"});
  for (const auto& c : selection.trace) {
    w.field(to_string(selection.method)).field(c.j).field(c.k).field(c.distance).field(c.threshold)
        .field(c.passed);
    w.end_row();
  }
}

void write_summary_csv(std::ostream& os, const SelectionResult& selection,
                       const OracleStart& start, bool timestamp) {
  CsvWriter w(os);
  if (timestamp) w.timestamp_line();
  w.header({"method", "index", "U", "estimate", "u_start", "saturated"});
  w.field(to_string(selection.method)).field(selection.index).field(selection.u)
      .field(selection.estimate).field(start.u_start).field(start.saturated);
  w.end_row();
}

}  // namespace levycov
