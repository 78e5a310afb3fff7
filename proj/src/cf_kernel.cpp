#include "levycov/cf_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace levycov {

namespace {

constexpr double kJumpHeadroom = 1.1;

double sign_of(Orientation o) { return o == Orientation::Diag ? 1.0 : -1.0; }

CfValue make_cf(double re_sum, double im_sum, double n) {
  CfValue v;
  v.value = {re_sum / n, im_sum / n};
  v.modulus = std::abs(v.value);
  return v;
}

}  // namespace

const char* to_string(Orientation o) { return o == Orientation::Diag ? "diag" : "anti"; }

double weight(double u, const WeightParams& wp) {
  if (!(wp.delta > 0.0)) throw std::invalid_argument("weight: delta must be positive");
  return std::pow(std::log(std::numbers::e + std::abs(u)), -0.5 - wp.delta);
}

CfValue ecf(std::span<const Vec2> increments, DiagonalFrequency freq) {
  if (increments.empty()) throw std::invalid_argument("ecf: empty sample");
  const double s = sign_of(freq.orientation);
  double re = 0.0;
  double im = 0.0;
  for (const auto& x : increments) {
    const double arg = freq.u * (x[0] + s * x[1]);
    re += std::cos(arg);
    im += std::sin(arg);
  }
  return make_cf(re, im, static_cast<double>(increments.size()));
}

CfValue ecf(const IncrementSample& sample, DiagonalFrequency freq) {
  return ecf(std::span<const Vec2>(sample.increments), freq);
}

ProjectedSample::ProjectedSample(const IncrementSample& sample, Orientation orientation) {
  if (sample.empty()) throw std::invalid_argument("ProjectedSample: empty sample");
  const double s = sign_of(orientation);
  proj_.reserve(sample.size());
  for (const auto& x : sample.increments) proj_.push_back(x[0] + s * x[1]);
}

CfValue ProjectedSample::ecf(double u) const {
  double re = 0.0;
  double im = 0.0;
  for (double p : proj_) {
    const double arg = u * p;
    re += std::cos(arg);
    im += std::sin(arg);
  }
  return make_cf(re, im, static_cast<double>(proj_.size()));
}

double kappa_n(double n, double u, const TruncationParams& tp, const WeightParams& wp) {
  if (!(tp.kappa > 0.0)) throw std::invalid_argument("kappa_n: kappa must be positive");
  if (!(n > 1.0)) throw std::invalid_argument("kappa_n: n must exceed 1");
  return 0.5 * tp.kappa * std::sqrt(std::log(n)) / weight(u, wp);
}

TruncatedInverse truncated_inverse(double ecf_modulus, double n, double u,
                                   const TruncationParams& tp, const WeightParams& wp) {
  const double threshold = kappa_n(n, u, tp, wp) / std::sqrt(n);
  if (ecf_modulus >= threshold) return {1.0 / ecf_modulus, false};
  return {1.0 / threshold, true};
}

double jump_exponent(const LevyModel& model, double u) {
  const double au = std::abs(u);
  double h = 0.0;
  for (const auto& j : model.jumps) {
    h += 2.0 * std::pow(j.scale, j.alpha) * std::pow(au, j.alpha);
  }
  return h;
}

double theoretical_cf_modulus(const LevyModel& model, double n, DiagonalFrequency freq) {
  for (const auto& j : model.jumps) j.validate();
  if (!(n > 0.0)) throw std::invalid_argument("theoretical_cf_modulus: n must be positive");
  const double quad = freq.orientation == Orientation::Diag ? model.c_sum() : model.c_anti();
  const double exponent = quad * freq.u * freq.u + jump_exponent(model, freq.u);
  return std::exp(-exponent / (2.0 * n));
}

double jump_bound_K(const LevyModel& model, std::span<const double> grid) {
  if (model.jumps.empty()) return 0.0;
  if (grid.empty()) throw std::invalid_argument("jump_bound_K: empty grid");
  double k = 0.0;
  for (const auto& j : model.jumps) {
    const double c = 2.0 * std::pow(j.scale, j.alpha);
    if (j.alpha == 2.0) {
      k += c;
      continue;
    }
    double sup = 0.0;
    for (double u : grid) {
      if (u > 0.0) sup = std::max(sup, c * std::pow(u, j.alpha - 2.0));
    }
    k += kJumpHeadroom * sup;
  }
  return k;
}

}  // namespace levycov
