#include "levycov/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace levycov {

FrequencyGrid::FrequencyGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw std::invalid_argument("frequency grid: need at least two points");
  if (!(points_.front() > 0.0)) throw std::invalid_argument("frequency grid: U_0 must be positive");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1])) {
      throw std::invalid_argument("frequency grid: points must be strictly increasing");
    }
  }
}

FrequencyGrid FrequencyGrid::log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) {
    throw std::invalid_argument("frequency grid: need 0 < lo < hi and count >= 2");
  }
  std::vector<double> pts(count);
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) pts[i] = std::exp(a + step * static_cast<double>(i));
  pts.front() = lo;
  pts.back() = hi;
  return FrequencyGrid(std::move(pts));
}

FrequencyGrid FrequencyGrid::linear(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) {
    throw std::invalid_argument("frequency grid: need 0 < lo < hi and count >= 2");
  }
  std::vector<double> pts(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) pts[i] = lo + step * static_cast<double>(i);
  pts.back() = hi;
  return FrequencyGrid(std::move(pts));
}

std::size_t FrequencyGrid::nearest_index(double u) const {
  const std::size_t hi = lower_bound_index(u);
  if (hi == 0) return 0;
  if (hi == points_.size()) return last_index();
  return (u - points_[hi - 1] <= points_[hi] - u) ? hi - 1 : hi;
}

std::size_t FrequencyGrid::lower_bound_index(double u) const {
  return static_cast<std::size_t>(std::lower_bound(points_.begin(), points_.end(), u) -
                                  points_.begin());
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Lepskii1: return "lepskii1";
    case Method::Lepskii2: return "lepskii2";
    case Method::Balancing: return "balancing";
  }
  return "unknown";
}

void BalancingConfig::validate() const {
  if (!(bigC > 0.0)) throw std::invalid_argument("balancing config: C must be positive");
  if (!(A > 0.0)) throw std::invalid_argument("balancing config: A must be positive");
  if (!(kappa > 0.0)) throw std::invalid_argument("balancing config: kappa must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("balancing config: delta must be positive");
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("balancing config: c must lie in (0, 1]");
}

BoundParams BalancingConfig::bound_params() const {
  BoundParams p;
  p.bigC = bigC;
  p.kappa = kappa;
  p.delta = delta;
  return p;
}

namespace {

OracleStart first_at_or_below(std::span<const double> moduli, const FrequencyGrid& grid,
                              double c) {
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("oracle start: c must lie in (0, 1]");
  OracleStart s;
  s.c = c;
  s.index = grid.last_index();
  s.saturated = true;
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    if (moduli[i] <= c) {
      s.index = i;
      s.saturated = false;
      break;
    }
  }
  s.u_start = grid[s.index];
  return s;
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": input sizes differ");
}

void require_nondecreasing(std::span<const double> v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) {
      throw std::invalid_argument(std::string(what) +
                                  ": curve must be nondecreasing along the grid");
    }
  }
}

SelectionResult finish(SelectionResult r, std::span<const CovEstimate> estimates) {
  r.u = estimates[r.index].u;
  r.estimate = estimates[r.index].value;
  return r;
}

}  // namespace

OracleStart oracle_start_empirical(const IncrementSample& sample, const FrequencyGrid& grid,
                                   double c) {
  const ProjectedSample diag(sample, Orientation::Diag);
  std::vector<double> moduli;
  moduli.reserve(grid.size());
  for (double u : grid.points()) {
    moduli.push_back(diag.ecf(u).modulus);
    if (moduli.back() <= c) break;
  }
  return first_at_or_below(moduli, grid, c);
}

OracleStart oracle_start_theoretical(const LevyModel& model, double n, const FrequencyGrid& grid,
                                     double c) {
  std::vector<double> moduli;
  moduli.reserve(grid.size());
  for (double u : grid.points()) {
    moduli.push_back(theoretical_cf_modulus(model, n, {u, Orientation::Diag}));
  }
  auto s = first_at_or_below(moduli, grid, c);
  s.interval = oracle_start_interval(model, n, grid.points());
  return s;
}

std::pair<double, double> oracle_start_interval(const LevyModel& model, double n,
                                                std::span<const double> k_grid) {
  const double c_sum = model.c_sum();
  if (!(c_sum > 0.0)) {
    throw std::invalid_argument("oracle_start_interval: C_sum must be positive");
  }
  const double k = jump_bound_K(model, k_grid);
  const double root = std::sqrt(2.0 * std::numbers::ln2) * std::sqrt(n);
  return {root / std::sqrt(c_sum + k), root / std::sqrt(c_sum)};
}

std::vector<CovEstimate> as_estimates(std::span<const double> values) {
  std::vector<CovEstimate> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i].u = static_cast<double>(i + 1);
    out[i].value = values[i];
  }
  return out;
}

SelectionResult lepskii_stop_rule(std::span<const CovEstimate> estimates,
                                  std::span<const double> bounds, double bigC) {
  require_same_size(estimates.size(), bounds.size(), "lepskii_stop_rule");
  if (estimates.size() < 2) throw std::invalid_argument("lepskii_stop_rule: need two grid points");
  require_nondecreasing(bounds, "lepskii_stop_rule");

  const std::size_t last = estimates.size() - 1;
  SelectionResult r;
  r.method = Method::Lepskii1;
  r.index = last;
  for (std::size_t j = 0; j < last; ++j) {
    const auto& candidate = estimates[j + 1];
    if (candidate.degenerate) {
      r.index = j;
      break;
    }
    const double threshold = bigC * bounds[j + 1];
    bool accepted = true;
    for (std::size_t k = 0; k <= j; ++k) {
      if (estimates[k].degenerate) continue;
      const double dist = std::abs(candidate.value - estimates[k].value);
      const bool ok = dist <= threshold;
      r.trace.push_back({j + 1, k, dist, threshold, ok});
      accepted = accepted && ok;
    }
    if (!accepted) {
      r.index = j;
      break;
    }
  }
  return finish(std::move(r), estimates);
}

SelectionResult lepskii_stop_rule_rates(std::span<const CovEstimate> estimates,
                                        std::span<const double> rates, double A) {
  require_same_size(estimates.size(), rates.size(), "lepskii_stop_rule_rates");
  if (estimates.size() < 2) {
    throw std::invalid_argument("lepskii_stop_rule_rates: need two grid points");
  }
  require_nondecreasing(rates, "lepskii_stop_rule_rates");

  const std::size_t last = estimates.size() - 1;
  SelectionResult r;
  r.method = Method::Lepskii2;
  r.index = last;
  for (std::size_t j = 0; j < last; ++j) {
    if (estimates[j].degenerate) continue;
    bool all_pass = true;
    for (std::size_t k = j + 1; k <= last; ++k) {
      if (estimates[k].degenerate) continue;
      const double dist = std::abs(estimates[j].value - estimates[k].value);
      const double threshold = BalancingConfig::kLepskii2Factor * A * rates[k];
      const bool ok = dist <= threshold;
      r.trace.push_back({j, k, dist, threshold, ok});
      all_pass = all_pass && ok;
    }
    if (all_pass) {
      r.index = j;
      break;
    }
  }
  return finish(std::move(r), estimates);
}

double balancing_threshold(double u, double n, double bigC, const WeightParams& wp,
                           double inverse_modulus) {
  return BalancingConfig::kBalancingFactor * bigC * gamma_n(n) / (u * u) / weight(u, wp) *
         inverse_modulus;
}

SelectionResult balancing_select(std::span<const CovEstimate> estimates,
                                 std::span<const double> stochastic_bound) {
  require_same_size(estimates.size(), stochastic_bound.size(), "balancing_select");
  if (estimates.empty()) {
    throw std::invalid_argument("balancing_select: empty restricted grid");
  }
  SelectionResult r;
  r.method = Method::Balancing;
  r.index = 0;
  for (std::size_t i = 1; i < estimates.size(); ++i) {
    if (estimates[i].degenerate) break;
    bool all_pass = true;
    for (std::size_t j = 0; j < i; ++j) {
      if (estimates[j].degenerate) continue;
      const double dist = std::abs(estimates[j].value - estimates[i].value);
      const double threshold = BalancingConfig::kBalancingFactor * stochastic_bound[j];
      const bool ok = dist <= threshold;
      r.trace.push_back({j, i, dist, threshold, ok});
      all_pass = all_pass && ok;
    }
    if (all_pass) r.index = i;
  }
  return finish(std::move(r), estimates);
}

double u_bal_theoretical(double n, double r, double M, double bigC, double kappa) {
  if (!(r > 1.0 && r <= 2.0)) throw std::invalid_argument("u_bal_theoretical: r must lie in (1, 2]");
  const double prefactor = 4.0 * bigC / (kappa * std::pow(2.0, r / 2.0) * M);
  return std::pow(prefactor, 1.0 / r) * std::pow(n, 1.0 / r);
}

double probability_floor(double n, double c) { return std::exp(-2.0 * n * (c + 1.0) * (c + 1.0)); }

AdaptiveResult adaptive_estimate(const IncrementSample& sample, const FrequencyGrid& grid,
                                 const BalancingConfig& config) {
  config.validate();
  const ProjectedSample diag(sample, Orientation::Diag);
  const ProjectedSample anti(sample, Orientation::AntiDiag);
  const double n = static_cast<double>(sample.size());
  const BoundParams bp = config.bound_params();

  AdaptiveResult out;
  std::vector<double> diag_mod(grid.size());
  std::vector<bool> truncated(grid.size());
  out.estimates.reserve(grid.size());
  out.s_emp.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double u = grid[i];
    const double dm = diag.ecf(u).modulus;
    const double am = anti.ecf(u).modulus;
    diag_mod[i] = dm;
    out.estimates.push_back(spectral_cov_from_moduli(n, u, dm, am));
    out.s_emp.push_back(stochastic_bound_emp_from_moduli(n, u, dm, am, bp));
    const auto td = truncated_inverse(dm, n, u, bp.truncation(), bp.weights());
    const auto ta = truncated_inverse(am, n, u, bp.truncation(), bp.weights());
    truncated[i] = td.truncated || ta.truncated;
  }

  out.start = first_at_or_below(diag_mod, grid, config.c);
  const std::size_t first = out.start.index;
  out.end_index = grid.last_index();
  if (config.end_rule == EndRule::LastUntruncated) {
    for (std::size_t i = first; i < grid.size(); ++i) {
      if (truncated[i]) {
        out.end_index = i > first ? i - 1 : first;
        break;
      }
    }
  }
  out.s_env = monotone_envelope(out.s_emp, first);

  const std::size_t count = out.end_index - first + 1;
  auto sel = balancing_select(std::span(out.estimates).subspan(first, count),
                              std::span(out.s_env).subspan(first, count));
  sel.index += first;
  for (auto& c : sel.trace) {
    c.j += first;
    c.k += first;
  }
  out.selection = std::move(sel);
  return out;
}

AdaptiveResult adaptive_estimate(const IncrementSample& sample, const FrequencyGrid& grid,
                                 const BalancingConfig& config, Method method) {
  AdaptiveResult out = adaptive_estimate(sample, grid, config);
  if (method == Method::Balancing) return out;

  const std::size_t first = out.start.index;
  const std::size_t count = out.end_index - first + 1;
  if (count < 2) {
    // Nothing to compare: keep the start point.
    out.selection = SelectionResult{first, grid[first], out.estimates[first].value, method, {}};
    return out;
  }
  const auto est = std::span<const CovEstimate>(out.estimates).subspan(first, count);
  SelectionResult sel;
  if (method == Method::Lepskii1) {
    std::vector<double> unit(count);
    for (std::size_t i = 0; i < count; ++i) unit[i] = out.s_env[first + i] / config.bigC;
    sel = lepskii_stop_rule(est, unit, config.bigC);
  } else {
    sel = lepskii_stop_rule_rates(est, std::span<const double>(out.s_env).subspan(first, count),
                                  config.A);
  }
  sel.index += first;
  sel.u = grid[sel.index];
  for (auto& c : sel.trace) {
    c.j += first;
    c.k += first;
  }
  out.selection = std::move(sel);
  return out;
}

}  // namespace levycov
