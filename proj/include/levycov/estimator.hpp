#pragma once

// Spectral estimator of the off-diagonal covariance C12 together with the
// stochastic/deterministic error bounds that drive frequency selection.

#include <cstddef>
#include <span>
#include <vector>

#include "levycov/cf_kernel.hpp"
#include "levycov/levy_sim.hpp"

namespace levycov {

struct CovEstimate {
  double u = 0.0;
  double value = 0.0;
  double phi_diag_mod = 1.0;
  double phi_anti_mod = 1.0;
  /// Set when either ECF modulus is exactly 0; value is then 0.
  bool degenerate = false;
};

struct BoundParams {
  double bigC = 1.0;
  double M = 1.0;
  double r = 1.5;  // co-jump activity index
  double kappa = 1.0;
  double delta = 0.5;

  void validate() const;
  TruncationParams truncation() const { return {kappa}; }
  WeightParams weights() const { return {delta}; }
};

struct BoundCurves {
  std::vector<double> grid;
  std::vector<double> s_theo;  // empty in data mode
  std::vector<double> s_emp;
  std::vector<double> s_env;   // running max of s_emp from the start index
  std::vector<double> d;
};

/// C^12_n(U) = n / (2U^2) (log|phi^(u~)| 1{phi^(u~) != 0} - log|phi^(u)| 1{phi^(u) != 0}).
CovEstimate spectral_cov(const IncrementSample& sample, double u);
/// Same estimator from precomputed ECF moduli.
CovEstimate spectral_cov_from_moduli(double n, double u, double diag_mod, double anti_mod);

/// Evaluate the estimator on every grid point (one projection pass per orientation).
std::vector<CovEstimate> spectral_cov_curve(const IncrementSample& sample,
                                            std::span<const double> grid);

/// (n log n)^(1/2).
double gamma_n(double n);

/// s_n(U) = C U^-2 (n log n)^(1/2) w(U)^-1 / |phi_n(u)| with the closed-form CF.
double stochastic_bound_theo(const LevyModel& model, double n, double u, const BoundParams& p);

/// s~_n(U): as s_n with the larger of the Diag/AntiDiag truncated inverses.
double stochastic_bound_emp(const IncrementSample& sample, double u, const BoundParams& p);
double stochastic_bound_emp_from_moduli(double n, double u, double diag_mod, double anti_mod,
                                        const BoundParams& p);

/// d(U) = M 2^(r/2) / U^(2-r).
double deterministic_bound(double u, const BoundParams& p);

/// n^-1/2 for r <= 1, (n log n)^((r-2)/2) otherwise.
double minimax_rate(double n, double r);

/// sqrt(n) for r <= 1, sqrt((r-1) n log n / M) otherwise.
double optimal_U(double n, double r, double M);

/// Running maximum of curve from start onward; entries before start are
/// copied unchanged.
std::vector<double> monotone_envelope(std::span<const double> curve, std::size_t start);

struct ErrorTerms {
  double stochastic = 0.0;     // H_n(U)
  double deterministic = 0.0;  // D(U)
  bool degenerate = false;     // both terms are +inf when set
};

/// Realized stochastic and deterministic error terms of the estimator at U,
/// available only when the model (and so the true CF) is known.
ErrorTerms error_decomposition(const IncrementSample& sample, const LevyModel& model, double u);
ErrorTerms error_decomposition_from_moduli(const LevyModel& model, double n, double u,
                                          double hat_diag, double hat_anti);

/// Fill every curve of BoundCurves. model may be null (data mode: s_theo empty).
BoundCurves bound_curves(const IncrementSample& sample, const LevyModel* model,
                         std::span<const double> grid, std::size_t envelope_start,
                         const BoundParams& p);

}  // namespace levycov
