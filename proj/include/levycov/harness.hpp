#pragma once

// Experiment harness: figure curves, oracle-start runs and the Monte Carlo
// property suite, each fanned out over independent seeds.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "levycov/adapt.hpp"
#include "levycov/estimator.hpp"
#include "levycov/levy_sim.hpp"

namespace levycov {

enum class ExperimentMode { Figure, OracleStart, PropertySuite };

struct ExperimentSpec {
  LevyModel model;
  std::size_t n = 1000;
  FrequencyGrid grid = FrequencyGrid::log_spaced(0.1, 50.0, 500);
  std::vector<std::uint64_t> seeds;
  ExperimentMode mode = ExperimentMode::Figure;
  BalancingConfig selector;
  /// Co-jump index and class bound for d(U), U_n and U_bal.
  double r = 1.5;
  double M = 1.0;

  void validate() const;
  BoundParams bound_params() const;
};

/// r defaults to the largest jump index when it lies in (1, 2], else 1.5;
/// M defaults to the class bound of the model.
double default_cojump_index(const LevyModel& model);
double default_class_constant(const LevyModel& model);

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count);

/// Run fn(i) for i in [0, count) on a small thread pool. Each index is an
/// independent work unit; results are written by index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

double median(std::vector<double> v);
/// Linear-interpolation quantile, q in [0, 1].
double quantile(std::vector<double> v, double q);
double median_absolute_deviation(const std::vector<double>& v);

struct FigureRow {
  std::uint64_t seed = 0;
  double u = 0.0;
  std::complex<double> phi_diag;
  std::complex<double> phi_anti;
  double log_diag = 0.0;
  double log_anti = 0.0;
  double log_diff = 0.0;  // log|phi^(u~)| - log|phi^(u)|
  double estimate = 0.0;
  double s_theo = 0.0;
  double s_emp = 0.0;
  bool degenerate = false;
};

struct SeedSelection {
  std::uint64_t seed = 0;
  OracleStart start;
  std::size_t end_index = 0;
  SelectionResult selection;
};

struct ExperimentRecord {
  std::vector<double> grid;
  std::vector<std::uint64_t> seeds;
  std::vector<FigureRow> rows;  // seed-major, |seeds| x |grid|
  std::vector<SeedSelection> selections;
  std::vector<double> median_estimate;  // per grid point, over seeds
  std::vector<double> q25_estimate;
  std::vector<double> q75_estimate;

  /// Median of all (seed, U) estimates with U in [lo, hi].
  double band_median(double lo, double hi) const;
};

ExperimentRecord run_figure_experiment(const ExperimentSpec& spec);

struct OracleRun {
  std::uint64_t seed = 0;
  OracleStart start;
  std::size_t end_index = 0;
  std::size_t index = 0;
  double u = 0.0;
  double estimate = 0.0;
  double s_emp_at_u_bal = 0.0;
  bool within_bound = false;  // |C^ - C12| <= 5 s~_n(U_bal)
  std::vector<double> curve_u;  // adaptive estimate curve beyond the start
  std::vector<double> curve_estimate;
};

struct OracleStartRecord {
  std::size_t n = 0;
  double u_bal = 0.0;
  std::size_t u_bal_index = 0;  // nearest grid point
  double probability_floor = 0.0;
  std::vector<OracleRun> runs;

  double median_u_start() const;
  double median_estimate() const;
  double mad_estimate() const;
  double bound_frequency() const;
};

std::vector<OracleStartRecord> run_oracle_start_experiment(
    const ExperimentSpec& spec, const std::vector<std::size_t>& sizes = {1000, 5000});

struct CheckResult {
  std::string name;
  std::size_t hits = 0;
  std::size_t total = 0;
  double floor = 1.0;

  double frequency() const { return total == 0 ? 1.0 : static_cast<double>(hits) / total; }
  bool passed() const { return total > 0 && frequency() >= floor; }
};

struct PropertyFloors {
  double truncation = 0.95;
  double interchange = 0.95;
  double decomposition = 1.0;
  double envelope = 1.0;
};

struct PropertyReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  const CheckResult& check(const std::string& name) const;
};

/// (a) |1/|phi~| - 1/|phi|| <= |1/phi|/2 where |phi| >= 2 kappa_n n^-1/2,
/// (b) s_n/2 <= s~_n <= 3 s_n on the same set, (c) the decomposition
/// inequality on every (seed, U), (d) envelope monotonicity and
/// s*_n(U_n) = s_n(U_n).
PropertyReport run_property_suite(const ExperimentSpec& spec,
                                  const PropertyFloors& floors = {});

/// |C^ - C12| <= |H| + |D| up to floating-point rounding of the two routes.
bool decomposition_holds(double estimate, double c12, const ErrorTerms& terms);

void write_figure_csv(const std::filesystem::path& dir, const ExperimentRecord& rec,
                      bool timestamp);
void write_oracle_start_csv(const std::filesystem::path& dir,
                            const std::vector<OracleStartRecord>& recs, bool timestamp);
void write_property_csv(const std::filesystem::path& dir, const PropertyReport& report,
                        bool timestamp);

std::ostream& write_figure_rows(std::ostream& os, const ExperimentRecord& rec, bool timestamp);

}  // namespace levycov
