#pragma once

// Characteristic functions on the diagonal u = (U, U) and anti-diagonal
// u~ = (U, -U): empirical, closed-form and truncated-inverse evaluations.

#include <complex>
#include <span>

#include "levycov/levy_sim.hpp"

namespace levycov {

enum class Orientation { Diag, AntiDiag };

const char* to_string(Orientation o);

struct DiagonalFrequency {
  double u = 0.0;
  Orientation orientation = Orientation::Diag;
};

struct WeightParams {
  double delta = 0.5;
};

struct TruncationParams {
  double kappa = 1.0;
};

struct CfValue {
  std::complex<double> value{1.0, 0.0};
  double modulus = 1.0;
};

/// w(U) = (log(e + |U|))^(-1/2 - delta).
double weight(double u, const WeightParams& wp);

/// (1/n) sum_j exp(i <u, dX_j>).
CfValue ecf(std::span<const Vec2> increments, DiagonalFrequency freq);
CfValue ecf(const IncrementSample& sample, DiagonalFrequency freq);

/// Projected increments dX1 + s dX2 (s = +1 for Diag, -1 for AntiDiag), so a
/// grid of ECF evaluations needs one pass over the sample per orientation.
class ProjectedSample {
 public:
  ProjectedSample(const IncrementSample& sample, Orientation orientation);

  CfValue ecf(double u) const;
  std::size_t size() const { return proj_.size(); }

 private:
  std::vector<double> proj_;
};

/// kappa_n = (kappa / 2) (log n)^(1/2) / w(U). n is real so that log n can be
/// set exactly in tests.
double kappa_n(double n, double u, const TruncationParams& tp, const WeightParams& wp);

struct TruncatedInverse {
  double value = 1.0;  // 1 / |phi~_n(u)|
  bool truncated = false;
};

/// 1/|phi^| when |phi^| >= kappa_n n^(-1/2) (boundary untruncated), otherwise
/// the threshold reciprocal 1 / (kappa_n n^(-1/2)).
TruncatedInverse truncated_inverse(double ecf_modulus, double n, double u,
                                   const TruncationParams& tp, const WeightParams& wp);

/// h(u) = 2 int (1 - cos<u, x>) F(dx). For axis-loaded symmetric stable
/// components this is 2 sum_i scale_i^alpha_i |U|^alpha_i on either orientation.
double jump_exponent(const LevyModel& model, double u);

/// |phi_n(u)| = exp(-(<Cu, u> + h(u)) / (2n)).
double theoretical_cf_modulus(const LevyModel& model, double n, DiagonalFrequency freq);

/// Constant K with h(U) <= K U^2 on [grid.front(), grid.back()]: the grid sup
/// of h(U)/U^2 with 10% headroom for components with alpha < 2; a Gaussian
/// (alpha = 2) component contributes its exact 2 scale^2.
double jump_bound_K(const LevyModel& model, std::span<const double> grid);

}  // namespace levycov
