#pragma once

// CSV emission and parsing. '.' decimal, ',' separator, one header row; an
// optional leading "# generated ..." comment line carries a timestamp.

#include <concepts>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "levycov/adapt.hpp"
#include "levycov/estimator.hpp"
#include "levycov/levy_sim.hpp"

namespace levycov {

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void timestamp_line();
  void header(std::initializer_list<std::string_view> names);

  CsvWriter& field(double v);
  CsvWriter& field(std::string_view v);
  CsvWriter& field(const char* v) { return field(std::string_view(v)); }
  CsvWriter& field(bool v);
  template <std::unsigned_integral T>
  CsvWriter& field(T v) {
    sep();
    os_ << v;
    return *this;
  }
  void end_row();

 private:
  void sep();

  std::ostream& os_;
  bool row_started_ = false;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
};

/// Comment lines starting with '#' are skipped.
CsvTable parse_csv(std::istream& is);

void write_increments_csv(std::ostream& os, const IncrementSample& sample, bool timestamp);
IncrementSample read_increments_csv(std::istream& is);
IncrementSample read_increments_csv(const std::filesystem::path& path);

/// U,re,im,modulus,orientation for both orientations.
void write_cf_curve_csv(std::ostream& os, const IncrementSample& sample,
                        std::span<const double> grid, bool timestamp);

/// U,estimate,s_theo,s_emp,s_env,d,degenerate. s_theo is empty in data mode.
void write_estimate_curve_csv(std::ostream& os, std::span<const CovEstimate> estimates,
                              const BoundCurves& curves, bool timestamp);

/// method,j,k,distance,threshold,passed
void write_trace_csv(std::ostream& os, const SelectionResult& selection, bool timestamp);

/// method,index,U,estimate,u_start,saturated
void write_summary_csv(std::ostream& os, const SelectionResult& selection,
                       const OracleStart& start, bool timestamp);

}  // namespace levycov
