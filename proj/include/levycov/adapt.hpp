#pragma once

// Data-driven choice of the spectral frequency U: oracle start, the two
// Lepskii stopping rules and the balancing principle.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "levycov/estimator.hpp"

namespace levycov {

/// Strictly increasing frequencies U_0 < ... < U_K with U_0 > 0 and K >= 1.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(std::vector<double> points);

  static FrequencyGrid log_spaced(double lo, double hi, std::size_t count);
  static FrequencyGrid linear(double lo, double hi, std::size_t count);

  std::span<const double> points() const& { return points_; }
  std::span<const double> points() const&& = delete;  // would dangle
  std::size_t size() const { return points_.size(); }
  std::size_t last_index() const { return points_.size() - 1; }
  double operator[](std::size_t i) const { return points_[i]; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }

  std::size_t nearest_index(double u) const;
  /// Index of the first point >= u (last_index() + 1 when none).
  std::size_t lower_bound_index(double u) const;

 private:
  std::vector<double> points_;
};

enum class Method { Lepskii1, Lepskii2, Balancing };

const char* to_string(Method m);

struct Comparison {
  std::size_t j = 0;
  std::size_t k = 0;
  double distance = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct SelectionResult {
  std::size_t index = 0;
  double u = 0.0;
  double estimate = 0.0;
  Method method = Method::Balancing;
  std::vector<Comparison> trace;
};

struct OracleStart {
  double u_start = 0.0;
  std::size_t index = 0;
  double c = 0.5;
  bool saturated = false;
  /// Analytic bracket, only for model-based runs.
  std::optional<std::pair<double, double>> interval;
};

enum class EndRule {
  /// Stop before the first grid point (at or after the start) whose ECF
  /// falls below the truncation threshold.
  LastUntruncated,
  GridMax,
};

struct BalancingConfig {
  static constexpr double kBalancingFactor = 8.0;
  static constexpr double kLepskii2Factor = 2.0;

  double bigC = 1.0;
  double A = 1.0;
  double kappa = 1.0;
  double delta = 0.5;
  double c = 0.5;
  EndRule end_rule = EndRule::LastUntruncated;

  void validate() const;
  BoundParams bound_params() const;
};

/// Smallest grid point with |phi^_n(U, U)| <= c; saturates at U_K.
OracleStart oracle_start_empirical(const IncrementSample& sample, const FrequencyGrid& grid,
                                   double c);

/// Same criterion evaluated on the closed-form CF modulus.
OracleStart oracle_start_theoretical(const LevyModel& model, double n, const FrequencyGrid& grid,
                                     double c = 0.5);

/// [sqrt(2 log 2 / (C_sum + K)) sqrt(n), sqrt(2 log 2 / C_sum) sqrt(n)], with K
/// from jump_bound_K over k_grid.
std::pair<double, double> oracle_start_interval(const LevyModel& model, double n,
                                                std::span<const double> k_grid);

/// Wrap raw values as non-degenerate estimates (for synthetic selector inputs).
std::vector<CovEstimate> as_estimates(std::span<const double> values);

/// Lepskii stopping rule: accept j+1 while |C_{j+1} - C_k| <= C s_n(U_{j+1})
/// for every k <= j; the first violation returns j. Degenerate k are skipped,
/// a degenerate candidate stops the scan.
SelectionResult lepskii_stop_rule(std::span<const CovEstimate> estimates,
                                  std::span<const double> bounds, double bigC);

/// Rate-based rule: the smallest j with |C_j - C_k| <= 2 A w_n(k) for all k > j.
SelectionResult lepskii_stop_rule_rates(std::span<const CovEstimate> estimates,
                                        std::span<const double> rates, double A);

/// 8 C gamma(n) / U^2 * w(U)^-1 * (1/|phi~_n(U)|).
double balancing_threshold(double u, double n, double bigC, const WeightParams& wp,
                           double inverse_modulus);

/// Largest i such that |C_j - C_i| <= 8 stochastic_bound[j] for every j <= i.
/// stochastic_bound is s~_n (or its envelope) with the constant C folded in.
SelectionResult balancing_select(std::span<const CovEstimate> estimates,
                                 std::span<const double> stochastic_bound);

/// (4C / (kappa 2^(r/2) M))^(1/r) n^(1/r).
double u_bal_theoretical(double n, double r, double M, double bigC, double kappa);

/// a(n) = exp(-2n(c+1)^2), reported only.
double probability_floor(double n, double c);

struct AdaptiveResult {
  SelectionResult selection;  // indices refer to the full grid
  OracleStart start;
  std::size_t end_index = 0;
  std::vector<CovEstimate> estimates;  // full grid
  std::vector<double> s_emp;           // full grid
  std::vector<double> s_env;           // envelope from start.index
};

/// oracle start -> restrict grid -> estimates and s~_n -> envelope -> balancing.
AdaptiveResult adaptive_estimate(const IncrementSample& sample, const FrequencyGrid& grid,
                                 const BalancingConfig& config);

/// As adaptive_estimate, but with the chosen rule on [start, end]. Lepskii1
/// compares against the envelope with C factored out; Lepskii2 uses the
/// envelope as its rate curve.
AdaptiveResult adaptive_estimate(const IncrementSample& sample, const FrequencyGrid& grid,
                                 const BalancingConfig& config, Method method);

}  // namespace levycov
