#include "levycov/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "levycov/csv.hpp"

namespace levycov {

void ExperimentSpec::validate() const {
  model.validate();
  if (n < 2) throw std::invalid_argument("experiment: n must be at least 2");
  if (seeds.empty()) throw std::invalid_argument("experiment: seed list is empty");
  selector.validate();
  bound_params().validate();
}

BoundParams ExperimentSpec::bound_params() const {
  BoundParams p = selector.bound_params();
  p.r = r;
  p.M = M;
  return p;
}

double default_cojump_index(const LevyModel& model) {
  const double a = model.max_alpha();
  return a > 1.0 ? a : 1.5;
}

double default_class_constant(const LevyModel& model) {
  const double m = model.class_bound();
  return m > 0.0 ? m : 1.0;
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = first + i;
  return s;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty input");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double median_absolute_deviation(const std::vector<double>& v) {
  const double m = median(v);
  std::vector<double> dev;
  dev.reserve(v.size());
  for (double x : v) dev.push_back(std::abs(x - m));
  return median(std::move(dev));
}

double ExperimentRecord::band_median(double lo, double hi) const {
  std::vector<double> vals;
  for (const auto& r : rows) {
    if (r.u >= lo && r.u <= hi) vals.push_back(r.estimate);
  }
  return median(std::move(vals));
}

namespace {

void require_mode(const ExperimentSpec& spec, ExperimentMode mode, const char* what) {
  if (spec.mode != mode) throw std::invalid_argument(std::string(what) + ": wrong experiment mode");
}

SimulationConfig sim_config(std::size_t n, std::uint64_t seed) {
  SimulationConfig c;
  c.n = n;
  c.seed = seed;
  return c;
}

}  // namespace

ExperimentRecord run_figure_experiment(const ExperimentSpec& spec) {
  require_mode(spec, ExperimentMode::Figure, "run_figure_experiment");
  spec.validate();

  const auto grid = spec.grid.points();
  const BoundParams bp = spec.bound_params();
  const double n = static_cast<double>(spec.n);

  ExperimentRecord rec;
  rec.grid.assign(grid.begin(), grid.end());
  rec.seeds = spec.seeds;
  rec.rows.resize(spec.seeds.size() * grid.size());
  rec.selections.resize(spec.seeds.size());

  std::vector<double> s_theo(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    s_theo[i] = stochastic_bound_theo(spec.model, n, grid[i], bp);
  }

  parallel_for(spec.seeds.size(), [&](std::size_t si) {
    const auto seed = spec.seeds[si];
    const auto sample = simulate_increments(spec.model, sim_config(spec.n, seed));
    const ProjectedSample diag(sample, Orientation::Diag);
    const ProjectedSample anti(sample, Orientation::AntiDiag);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double u = grid[i];
      const CfValue d = diag.ecf(u);
      const CfValue a = anti.ecf(u);
      const CovEstimate e = spectral_cov_from_moduli(n, u, d.modulus, a.modulus);
      FigureRow& row = rec.rows[si * grid.size() + i];
      row.seed = seed;
      row.u = u;
      row.phi_diag = d.value;
      row.phi_anti = a.value;
      row.log_diag = std::log(d.modulus);
      row.log_anti = std::log(a.modulus);
      row.log_diff = row.log_anti - row.log_diag;
      row.estimate = e.value;
      row.degenerate = e.degenerate;
      row.s_theo = s_theo[i];
      row.s_emp = stochastic_bound_emp_from_moduli(n, u, d.modulus, a.modulus, bp);
    }
    const auto adaptive = adaptive_estimate(sample, spec.grid, spec.selector);
    rec.selections[si] = {seed, adaptive.start, adaptive.end_index, adaptive.selection};
  });

  rec.median_estimate.resize(grid.size());
  rec.q25_estimate.resize(grid.size());
  rec.q75_estimate.resize(grid.size());
  std::vector<double> column(spec.seeds.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t si = 0; si < spec.seeds.size(); ++si) {
      column[si] = rec.rows[si * grid.size() + i].estimate;
    }
    rec.median_estimate[i] = median(column);
    rec.q25_estimate[i] = quantile(column, 0.25);
    rec.q75_estimate[i] = quantile(column, 0.75);
  }
  return rec;
}

double OracleStartRecord::median_u_start() const {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.start.u_start);
  return median(std::move(v));
}

double OracleStartRecord::median_estimate() const {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.estimate);
  return median(std::move(v));
}

double OracleStartRecord::mad_estimate() const {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.estimate);
  return median_absolute_deviation(v);
}

double OracleStartRecord::bound_frequency() const {
  if (runs.empty()) return 0.0;
  const auto hits = std::count_if(runs.begin(), runs.end(), [](const auto& r) { return r.within_bound; });
  return static_cast<double>(hits) / static_cast<double>(runs.size());
}

std::vector<OracleStartRecord> run_oracle_start_experiment(const ExperimentSpec& spec,
                                                           const std::vector<std::size_t>& sizes) {
  require_mode(spec, ExperimentMode::OracleStart, "run_oracle_start_experiment");
  spec.validate();
  const BoundParams bp = spec.bound_params();

  std::vector<OracleStartRecord> out;
  for (std::size_t size : sizes) {
    if (size < 2) throw std::invalid_argument("oracle-start experiment: n must be at least 2");
    const double n = static_cast<double>(size);
    OracleStartRecord rec;
    rec.n = size;
    rec.u_bal = u_bal_theoretical(n, spec.r, spec.M, bp.bigC, bp.kappa);
    rec.u_bal_index = spec.grid.nearest_index(rec.u_bal);
    rec.probability_floor = probability_floor(n, spec.selector.c);
    rec.runs.resize(spec.seeds.size());

    parallel_for(spec.seeds.size(), [&](std::size_t si) {
      const auto seed = spec.seeds[si];
      const auto sample = simulate_increments(spec.model, sim_config(size, seed));
      const auto res = adaptive_estimate(sample, spec.grid, spec.selector);
      OracleRun& run = rec.runs[si];
      run.seed = seed;
      run.start = res.start;
      run.end_index = res.end_index;
      run.index = res.selection.index;
      run.u = res.selection.u;
      run.estimate = res.selection.estimate;
      run.s_emp_at_u_bal = res.s_emp[rec.u_bal_index];
      run.within_bound = std::abs(run.estimate - spec.model.c12()) <= 5.0 * run.s_emp_at_u_bal;
      for (std::size_t i = res.start.index; i <= res.end_index; ++i) {
        run.curve_u.push_back(res.estimates[i].u);
        run.curve_estimate.push_back(res.estimates[i].value);
      }
    });
    out.push_back(std::move(rec));
  }
  return out;
}

bool decomposition_holds(double estimate, double c12, const ErrorTerms& terms) {
  if (terms.degenerate) return true;
  const double lhs = std::abs(estimate - c12);
  const double rhs = std::abs(terms.stochastic) + std::abs(terms.deterministic);
  // The two sides are evaluated along different rounding paths.
  const double slack = 1e-12 * (1.0 + std::abs(estimate) + std::abs(c12) + rhs);
  return lhs <= rhs + slack;
}

bool PropertyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
}

const CheckResult& PropertyReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("property report: no check named " + name);
}

PropertyReport run_property_suite(const ExperimentSpec& spec, const PropertyFloors& floors) {
  require_mode(spec, ExperimentMode::PropertySuite, "run_property_suite");
  spec.validate();

  const auto grid = spec.grid.points();
  const BoundParams bp = spec.bound_params();
  const double n = static_cast<double>(spec.n);
  const double c12 = spec.model.c12();

  struct Counts {
    std::size_t trunc_hits = 0, trunc_total = 0;
    std::size_t inter_hits = 0, inter_total = 0;
    std::size_t decomp_hits = 0, decomp_total = 0;
    bool envelope_ok = true;
  };
  std::vector<Counts> per_seed(spec.seeds.size());

  std::vector<double> phi_diag(grid.size()), s_theo(grid.size()), threshold(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    phi_diag[i] = theoretical_cf_modulus(spec.model, n, {grid[i], Orientation::Diag});
    s_theo[i] = stochastic_bound_theo(spec.model, n, grid[i], bp);
    threshold[i] = kappa_n(n, grid[i], bp.truncation(), bp.weights()) / std::sqrt(n);
  }

  parallel_for(spec.seeds.size(), [&](std::size_t si) {
    const auto sample = simulate_increments(spec.model, sim_config(spec.n, spec.seeds[si]));
    const ProjectedSample diag(sample, Orientation::Diag);
    const ProjectedSample anti(sample, Orientation::AntiDiag);
    Counts& c = per_seed[si];
    std::vector<double> s_emp(grid.size());
    std::size_t start = grid.size() - 1;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double u = grid[i];
      const double hd = diag.ecf(u).modulus;
      const double ha = anti.ecf(u).modulus;
      s_emp[i] = stochastic_bound_emp_from_moduli(n, u, hd, ha, bp);
      if (start == grid.size() - 1 && hd <= spec.selector.c) start = i;

      if (phi_diag[i] >= 2.0 * threshold[i]) {
        const double inv_true = 1.0 / phi_diag[i];
        const double inv_trunc = truncated_inverse(hd, n, u, bp.truncation(), bp.weights()).value;
        ++c.trunc_total;
        if (std::abs(inv_trunc - inv_true) <= 0.5 * inv_true) ++c.trunc_hits;
        ++c.inter_total;
        if (0.5 * s_theo[i] <= s_emp[i] && s_emp[i] <= 3.0 * s_theo[i]) ++c.inter_hits;
      }

      const CovEstimate e = spectral_cov_from_moduli(n, u, hd, ha);
      const ErrorTerms t = error_decomposition_from_moduli(spec.model, n, u, hd, ha);
      ++c.decomp_total;
      if (decomposition_holds(e.value, c12, t)) ++c.decomp_hits;
    }
    const auto env = monotone_envelope(s_emp, start);
    c.envelope_ok = std::is_sorted(env.begin() + static_cast<std::ptrdiff_t>(start), env.end());
  });

  Counts total;
  std::size_t envelope_hits = 0;
  for (const auto& c : per_seed) {
    total.trunc_hits += c.trunc_hits;
    total.trunc_total += c.trunc_total;
    total.inter_hits += c.inter_hits;
    total.inter_total += c.inter_total;
    total.decomp_hits += c.decomp_hits;
    total.decomp_total += c.decomp_total;
    envelope_hits += c.envelope_ok ? 1 : 0;
  }

  // Population envelope: start where |phi_n| first drops to 1/2.
  const auto theo_start = oracle_start_theoretical(spec.model, n, spec.grid, 0.5).index;
  const auto env = monotone_envelope(s_theo, theo_start);
  const std::size_t un = spec.grid.nearest_index(optimal_U(n, spec.r, spec.M));
  const bool theo_ok = std::is_sorted(env.begin() + static_cast<std::ptrdiff_t>(theo_start), env.end()) &&
                       un >= theo_start && env[un] == s_theo[un];

  PropertyReport report;
  report.checks.push_back({"truncation_interchange", total.trunc_hits, total.trunc_total, floors.truncation});
  report.checks.push_back({"bound_interchange", total.inter_hits, total.inter_total, floors.interchange});
  report.checks.push_back({"decomposition", total.decomp_hits, total.decomp_total, floors.decomposition});
  report.checks.push_back({"envelope", envelope_hits + (theo_ok ? 1 : 0), per_seed.size() + 1, floors.envelope});
  return report;
}

std::ostream& write_figure_rows(std::ostream& os, const ExperimentRecord& rec, bool timestamp) {
  CsvWriter w(os);
  if (timestamp) w.timestamp_line();
  w.header({"seed", "U", "diag_re", "diag_im", "anti_re", "anti_im", "log_diag", "log_anti",
            "log_diff", "estimate", "s_theo", "s_emp", "degenerate"});
  for (const auto& r : rec.rows) {
    w.field(r.seed).field(r.u).field(r.phi_diag.real()).field(r.phi_diag.imag())
        .field(r.phi_anti.real()).field(r.phi_anti.imag()).field(r.log_diag).field(r.log_anti)
        .field(r.log_diff).field(r.estimate).field(r.s_theo).field(r.s_emp).field(r.degenerate);
    w.end_row();
  }
  return os;
}

namespace {

std::ofstream open_out(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_figure_csv(const std::filesystem::path& dir, const ExperimentRecord& rec, bool timestamp) {
  {
    auto out = open_out(dir, "figure_rows.csv");
    write_figure_rows(out, rec, timestamp);
  }
  {
    auto out = open_out(dir, "figure_summary.csv");
    CsvWriter w(out);
    if (timestamp) w.timestamp_line();
    w.header({"U", "median", "q25", "q75"});
    for (std::size_t i = 0; i < rec.grid.size(); ++i) {
      w.field(rec.grid[i]).field(rec.median_estimate[i]).field(rec.q25_estimate[i])
          .field(rec.q75_estimate[i]);
      w.end_row();
    }
  }
  {
    auto out = open_out(dir, "figure_selections.csv");
    CsvWriter w(out);
    if (timestamp) w.timestamp_line();
    w.header({"seed", "method", "index", "U", "estimate", "u_start", "saturated", "end_index"});
    for (const auto& s : rec.selections) {
      w.field(s.seed).field(to_string(s.selection.method)).field(s.selection.index)
          .field(s.selection.u).field(s.selection.estimate).field(s.start.u_start)
          .field(s.start.saturated).field(s.end_index);
      w.end_row();
    }
  }
}

void write_oracle_start_csv(const std::filesystem::path& dir,
                            const std::vector<OracleStartRecord>& recs, bool timestamp) {
  {
    auto out = open_out(dir, "oracle_start_runs.csv");
    CsvWriter w(out);
    if (timestamp) w.timestamp_line();
    w.header({"n", "seed", "u_start", "saturated", "index", "U", "estimate", "u_bal",
              "s_emp_at_u_bal", "within_bound"});
    for (const auto& rec : recs) {
      for (const auto& r : rec.runs) {
        w.field(rec.n).field(r.seed).field(r.start.u_start).field(r.start.saturated).field(r.index)
            .field(r.u).field(r.estimate).field(rec.u_bal).field(r.s_emp_at_u_bal)
            .field(r.within_bound);
        w.end_row();
      }
    }
  }
  {
    auto out = open_out(dir, "oracle_start_curves.csv");
    CsvWriter w(out);
    if (timestamp) w.timestamp_line();
    w.header({"n", "seed", "U", "estimate"});
    for (const auto& rec : recs) {
      for (const auto& r : rec.runs) {
        for (std::size_t i = 0; i < r.curve_u.size(); ++i) {
          w.field(rec.n).field(r.seed).field(r.curve_u[i]).field(r.curve_estimate[i]);
          w.end_row();
        }
      }
    }
  }
  {
    auto out = open_out(dir, "oracle_start_summary.csv");
    CsvWriter w(out);
    if (timestamp) w.timestamp_line();
    w.header({"n", "median_u_start", "median_estimate", "mad_estimate", "u_bal",
              "bound_frequency", "probability_floor"});
    for (const auto& rec : recs) {
      w.field(rec.n).field(rec.median_u_start()).field(rec.median_estimate())
          .field(rec.mad_estimate()).field(rec.u_bal).field(rec.bound_frequency())
          .field(rec.probability_floor);
      w.end_row();
    }
  }
}

void write_property_csv(const std::filesystem::path& dir, const PropertyReport& report,
                        bool timestamp) {
  auto out = open_out(dir, "properties.csv");
  CsvWriter w(out);
  if (timestamp) w.timestamp_line();
  w.header({"check", "hits", "total", "frequency", "floor", "passed"});
  for (const auto& c : report.checks) {
    w.field(c.name).field(c.hits).field(c.total).field(c.frequency()).field(c.floor)
        .field(c.passed());
    w.end_row();
  }
}

}  // namespace levycov
