#include "levycov/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace levycov {

void BoundParams::validate() const {
  if (!(bigC > 0.0)) throw std::invalid_argument("bound params: C must be positive");
  if (!(M > 0.0)) throw std::invalid_argument("bound params: M must be positive");
  if (!(r > 1.0 && r <= 2.0)) throw std::invalid_argument("bound params: r must lie in (1, 2]");
  if (!(kappa > 0.0)) throw std::invalid_argument("bound params: kappa must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("bound params: delta must be positive");
}

CovEstimate spectral_cov_from_moduli(double n, double u, double diag_mod, double anti_mod) {
  if (!(u > 0.0)) throw std::invalid_argument("spectral_cov: U must be positive");
  CovEstimate e;
  e.u = u;
  e.phi_diag_mod = diag_mod;
  e.phi_anti_mod = anti_mod;
  e.degenerate = diag_mod == 0.0 || anti_mod == 0.0;
  const double log_anti = anti_mod != 0.0 ? std::log(anti_mod) : 0.0;
  const double log_diag = diag_mod != 0.0 ? std::log(diag_mod) : 0.0;
  e.value = e.degenerate ? 0.0 : n / (2.0 * u * u) * (log_anti - log_diag);
  return e;
}

CovEstimate spectral_cov(const IncrementSample& sample, double u) {
  if (!(u > 0.0)) throw std::invalid_argument("spectral_cov: U must be positive");
  const double diag = ecf(sample, {u, Orientation::Diag}).modulus;
  const double anti = ecf(sample, {u, Orientation::AntiDiag}).modulus;
  return spectral_cov_from_moduli(static_cast<double>(sample.size()), u, diag, anti);
}

std::vector<CovEstimate> spectral_cov_curve(const IncrementSample& sample,
                                            std::span<const double> grid) {
  const ProjectedSample diag(sample, Orientation::Diag);
  const ProjectedSample anti(sample, Orientation::AntiDiag);
  const double n = static_cast<double>(sample.size());
  std::vector<CovEstimate> out;
  out.reserve(grid.size());
  for (double u : grid) {
    out.push_back(spectral_cov_from_moduli(n, u, diag.ecf(u).modulus, anti.ecf(u).modulus));
  }
  return out;
}

double gamma_n(double n) { return std::sqrt(n * std::log(n)); }

namespace {

double bound_prefactor(double n, double u, const BoundParams& p) {
  if (!(u > 0.0)) throw std::invalid_argument("stochastic bound: U must be positive");
  return p.bigC / (u * u) * gamma_n(n) / weight(u, p.weights());
}

}  // namespace

double stochastic_bound_theo(const LevyModel& model, double n, double u, const BoundParams& p) {
  const double phi = theoretical_cf_modulus(model, n, {u, Orientation::Diag});
  return bound_prefactor(n, u, p) / phi;
}

double stochastic_bound_emp_from_moduli(double n, double u, double diag_mod, double anti_mod,
                                        const BoundParams& p) {
  const auto inv_diag = truncated_inverse(diag_mod, n, u, p.truncation(), p.weights());
  const auto inv_anti = truncated_inverse(anti_mod, n, u, p.truncation(), p.weights());
  return bound_prefactor(n, u, p) * std::max(inv_diag.value, inv_anti.value);
}

double stochastic_bound_emp(const IncrementSample& sample, double u, const BoundParams& p) {
  const double diag = ecf(sample, {u, Orientation::Diag}).modulus;
  const double anti = ecf(sample, {u, Orientation::AntiDiag}).modulus;
  return stochastic_bound_emp_from_moduli(static_cast<double>(sample.size()), u, diag, anti, p);
}

double deterministic_bound(double u, const BoundParams& p) {
  if (!(u > 0.0)) throw std::invalid_argument("deterministic_bound: U must be positive");
  if (!(p.r > 1.0 && p.r <= 2.0)) {
    throw std::invalid_argument("deterministic_bound: r must lie in (1, 2]");
  }
  return p.M * std::pow(2.0, p.r / 2.0) / std::pow(u, 2.0 - p.r);
}

double minimax_rate(double n, double r) {
  if (!(n >= 2.0)) throw std::invalid_argument("minimax_rate: n must be at least 2");
  if (r <= 1.0) return 1.0 / std::sqrt(n);
  return std::pow(n * std::log(n), (r - 2.0) / 2.0);
}

double optimal_U(double n, double r, double M) {
  if (r <= 1.0) return std::sqrt(n);
  if (!(M > 0.0)) throw std::invalid_argument("optimal_U: M must be positive");
  return std::sqrt((r - 1.0) * n * std::log(n) / M);
}

std::vector<double> monotone_envelope(std::span<const double> curve, std::size_t start) {
  if (start >= curve.size() && !curve.empty()) {
    throw std::out_of_range("monotone_envelope: start index beyond curve");
  }
  std::vector<double> out(curve.begin(), curve.end());
  for (std::size_t i = start + 1; i < out.size(); ++i) out[i] = std::max(out[i], out[i - 1]);
  return out;
}

ErrorTerms error_decomposition_from_moduli(const LevyModel& model, double n, double u,
                                          double hat_diag, double hat_anti) {
  if (!(u > 0.0)) throw std::invalid_argument("error_decomposition: U must be positive");
  const double scale = n / (2.0 * u * u);
  const double phi_diag = theoretical_cf_modulus(model, n, {u, Orientation::Diag});
  const double phi_anti = theoretical_cf_modulus(model, n, {u, Orientation::AntiDiag});

  ErrorTerms t;
  if (hat_diag == 0.0 || hat_anti == 0.0 || phi_diag == 0.0 || phi_anti == 0.0) {
    t.degenerate = true;
    t.stochastic = std::numeric_limits<double>::infinity();
    t.deterministic = std::numeric_limits<double>::infinity();
    return t;
  }
  const double true_ratio = std::log(phi_anti) - std::log(phi_diag);
  const double emp_ratio = std::log(hat_anti) - std::log(hat_diag);
  t.stochastic = -scale * (true_ratio - emp_ratio);
  t.deterministic = scale * true_ratio - model.c12();
  return t;
}

ErrorTerms error_decomposition(const IncrementSample& sample, const LevyModel& model, double u) {
  const double hat_diag = ecf(sample, {u, Orientation::Diag}).modulus;
  const double hat_anti = ecf(sample, {u, Orientation::AntiDiag}).modulus;
  return error_decomposition_from_moduli(model, static_cast<double>(sample.size()), u, hat_diag,
                                         hat_anti);
}

BoundCurves bound_curves(const IncrementSample& sample, const LevyModel* model,
                         std::span<const double> grid, std::size_t envelope_start,
                         const BoundParams& p) {
  const ProjectedSample diag(sample, Orientation::Diag);
  const ProjectedSample anti(sample, Orientation::AntiDiag);
  const double n = static_cast<double>(sample.size());

  BoundCurves c;
  c.grid.assign(grid.begin(), grid.end());
  c.s_emp.reserve(grid.size());
  c.d.reserve(grid.size());
  for (double u : grid) {
    c.s_emp.push_back(
        stochastic_bound_emp_from_moduli(n, u, diag.ecf(u).modulus, anti.ecf(u).modulus, p));
    c.d.push_back(deterministic_bound(u, p));
    if (model != nullptr) c.s_theo.push_back(stochastic_bound_theo(*model, n, u, p));
  }
  c.s_env = monotone_envelope(c.s_emp, envelope_start);
  return c;
}

}  // namespace levycov
