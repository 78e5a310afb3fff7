#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "levycov/config.hpp"
#include "levycov/csv.hpp"
#include "levycov/harness.hpp"

namespace fs = std::filesystem;
using namespace levycov;

namespace {

struct Options {
  std::string config;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> seeds;
  std::optional<double> grid_min, grid_max;
  std::optional<std::size_t> grid_points;
  bool grid_log = false;
  bool grid_linear = false;
  std::optional<double> c, delta, kappa, bigC, A, r, M;
  std::string out;
  bool no_timestamp = false;
  std::string input;
  std::string method = "balancing";
};

// Used when no --config is given: the Gaussian-dominated two-axis model.
ExperimentSpec default_spec() {
  return parse_experiment_string(R"({
    "cov": [[2, 1], [1, 1]],
    "jumps": [{"alpha": 0.2, "scale": 0.3, "axis": 1},
              {"alpha": 0.1, "scale": 0.3, "axis": 2}],
    "seeds": 20
  })");
}

ExperimentSpec build_spec(const Options& o) {
  ExperimentSpec s = o.config.empty() ? default_spec() : load_experiment(o.config);
  if (o.n) s.n = *o.n;
  if (o.seed || o.seeds) {
    const std::uint64_t first = o.seed.value_or(s.seeds.front());
    s.seeds = seed_range(first, o.seeds.value_or(s.seeds.size()));
  }
  if (o.grid_min || o.grid_max || o.grid_points || o.grid_log || o.grid_linear) {
    const double lo = o.grid_min.value_or(s.grid.front());
    const double hi = o.grid_max.value_or(s.grid.back());
    const std::size_t k = o.grid_points.value_or(s.grid.size());
    s.grid = o.grid_linear ? FrequencyGrid::linear(lo, hi, k) : FrequencyGrid::log_spaced(lo, hi, k);
  }
  if (o.c) s.selector.c = *o.c;
  if (o.delta) s.selector.delta = *o.delta;
  if (o.kappa) s.selector.kappa = *o.kappa;
  if (o.bigC) s.selector.bigC = *o.bigC;
  if (o.A) s.selector.A = *o.A;
  if (o.r) s.r = *o.r;
  if (o.M) s.M = *o.M;
  s.validate();
  return s;
}

Method parse_method(const std::string& m) {
  if (m == "lepskii1") return Method::Lepskii1;
  if (m == "lepskii2") return Method::Lepskii2;
  return Method::Balancing;
}

IncrementSample obtain_sample(const Options& o, const ExperimentSpec& s) {
  if (!o.input.empty()) return read_increments_csv(fs::path(o.input));
  return simulate_increments(s.model, first_simulation(s));
}

// Writes to <out>/<name> when --out is set, else to stdout.
template <class Fn>
void emit(const Options& o, const std::string& name, Fn&& fn) {
  if (o.out.empty()) {
    fn(std::cout);
    return;
  }
  fs::create_directories(o.out);
  const fs::path path = fs::path(o.out) / name;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  fn(f);
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

int cmd_simulate(const Options& o) {
  const auto s = build_spec(o);
  const auto sample = simulate_increments(s.model, first_simulation(s));
  const bool ts = !o.no_timestamp;
  emit(o, "increments.csv", [&](std::ostream& os) { write_increments_csv(os, sample, ts); });
  if (!o.out.empty()) {
    emit(o, "cf_curve.csv",
         [&](std::ostream& os) { write_cf_curve_csv(os, sample, s.grid.points(), ts); });
  }
  return 0;
}

int cmd_estimate(const Options& o) {
  const auto s = build_spec(o);
  const auto sample = obtain_sample(o, s);
  const auto start = oracle_start_empirical(sample, s.grid, s.selector.c);
  const auto estimates = spectral_cov_curve(sample, s.grid.points());
  const LevyModel* model = o.input.empty() ? &s.model : nullptr;
  const auto curves = bound_curves(sample, model, s.grid.points(), start.index, s.bound_params());
  emit(o, "estimates.csv", [&](std::ostream& os) {
    write_estimate_curve_csv(os, estimates, curves, !o.no_timestamp);
  });
  return 0;
}

int cmd_select(const Options& o) {
  const auto s = build_spec(o);
  const auto sample = obtain_sample(o, s);
  const auto res = adaptive_estimate(sample, s.grid, s.selector, parse_method(o.method));
  const bool ts = !o.no_timestamp;
  emit(o, "summary.csv",
       [&](std::ostream& os) { write_summary_csv(os, res.selection, res.start, ts); });
  if (!o.out.empty()) {
    emit(o, "trace.csv", [&](std::ostream& os) { write_trace_csv(os, res.selection, ts); });
  }
  return 0;
}

int cmd_figure(const Options& o) {
  auto s = build_spec(o);
  s.mode = ExperimentMode::Figure;
  const auto rec = run_figure_experiment(s);
  if (o.out.empty()) {
    write_figure_rows(std::cout, rec, !o.no_timestamp);
  } else {
    write_figure_csv(o.out, rec, !o.no_timestamp);
  }
  std::cerr << "median estimate over U in [5, 30]: " << format_double(rec.band_median(5.0, 30.0))
            << "\n";
  return 0;
}

int cmd_oracle_start(const Options& o) {
  auto s = build_spec(o);
  s.mode = ExperimentMode::OracleStart;
  const auto recs = run_oracle_start_experiment(s);
  if (!o.out.empty()) write_oracle_start_csv(o.out, recs, !o.no_timestamp);
  for (const auto& r : recs) {
    std::cout << "n=" << r.n << " median_u_start=" << format_double(r.median_u_start())
              << " median_estimate=" << format_double(r.median_estimate())
              << " mad=" << format_double(r.mad_estimate())
              << " u_bal=" << format_double(r.u_bal)
              << " bound_frequency=" << format_double(r.bound_frequency()) << "\n";
  }
  return 0;
}

int cmd_properties(const Options& o) {
  auto s = build_spec(o);
  s.mode = ExperimentMode::PropertySuite;
  const auto report = run_property_suite(s);
  if (!o.out.empty()) write_property_csv(o.out, report, !o.no_timestamp);
  for (const auto& c : report.checks) {
    std::cout << (c.passed() ? "PASS " : "FAIL ") << c.name << " " << c.hits << "/" << c.total
              << " floor=" << format_double(c.floor) << "\n";
  }
  return report.passed() ? 0 : 1;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON experiment file")->check(CLI::ExistingFile);
  sub->add_option("--n", o.n, "number of increments");
  sub->add_option("--seed", o.seed, "first seed");
  sub->add_option("--seeds", o.seeds, "number of consecutive seeds");
  sub->add_option("--grid-min", o.grid_min);
  sub->add_option("--grid-max", o.grid_max);
  sub->add_option("--grid-points", o.grid_points);
  auto* log = sub->add_flag("--grid-log", o.grid_log, "log-spaced grid (default)");
  sub->add_flag("--grid-linear", o.grid_linear, "uniformly spaced grid")->excludes(log);
  sub->add_option("--c", o.c, "oracle-start threshold in (0, 1]");
  sub->add_option("--delta", o.delta, "weight exponent");
  sub->add_option("--kappa", o.kappa, "truncation constant");
  sub->add_option("--bigC", o.bigC, "stochastic bound constant");
  sub->add_option("--A", o.A, "rate-rule constant");
  sub->add_option("--r", o.r, "co-jump index in (1, 2]");
  sub->add_option("--M", o.M, "class constant");
  sub->add_option("--out", o.out, "output directory (stdout when absent)");
  sub->add_flag("--no-timestamp", o.no_timestamp, "omit the generated-at comment line");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral estimation of the cross covariance of a bivariate Levy process"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "simulate increments");
  auto* est = app.add_subcommand("estimate", "estimator and bound curves over the grid");
  auto* sel = app.add_subcommand("select", "data-driven choice of U");
  auto* fig = app.add_subcommand("figure", "multi-seed estimate curves");
  auto* ors = app.add_subcommand("oracle-start", "adaptive runs at n = 1000 and 5000");
  auto* prop = app.add_subcommand("properties", "Monte Carlo property suite");
  for (auto* sub : {sim, est, sel, fig, ors, prop}) add_common(sub, o);
  for (auto* sub : {est, sel}) {
    sub->add_option("--input", o.input, "increments CSV (dx1,dx2)")->check(CLI::ExistingFile);
  }
  sel->add_option("--method", o.method, "selection rule")
      ->check(CLI::IsMember({"balancing", "lepskii1", "lepskii2"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(o);
    if (*est) return cmd_estimate(o);
    if (*sel) return cmd_select(o);
    if (*fig) return cmd_figure(o);
    if (*ors) return cmd_oracle_start(o);
    if (*prop) return cmd_properties(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
