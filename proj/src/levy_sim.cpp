#include "levycov/levy_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace levycov {

namespace {

constexpr double kPsdTolerance = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void StableComponent::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw std::invalid_argument("stable component: alpha must lie in (0, 2], got " +
                                std::to_string(alpha));
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("stable component: scale must be positive, got " +
                                std::to_string(scale));
  }
  if (axis != 1 && axis != 2) {
    throw std::invalid_argument("stable component: axis must be 1 or 2, got " +
                                std::to_string(axis));
  }
}

void LevyModel::validate() const {
  (void)cholesky2(cov);
  if (!std::isfinite(drift[0]) || !std::isfinite(drift[1])) {
    throw std::invalid_argument("levy model: drift must be finite");
  }
  if (jumps.size() > 2) {
    throw std::invalid_argument("levy model: at most two jump components");
  }
  for (const auto& j : jumps) j.validate();
}

double LevyModel::c_sum() const {
  return cov[0][0] + cov[0][1] + cov[1][0] + cov[1][1];
}

double LevyModel::c_anti() const {
  return cov[0][0] + cov[1][1] - cov[0][1] - cov[1][0];
}

double LevyModel::class_bound() const {
  return std::max(std::abs(cov[0][0]) + std::abs(cov[0][1]),
                  std::abs(cov[1][0]) + std::abs(cov[1][1]));
}

double LevyModel::max_alpha() const {
  double a = 0.0;
  for (const auto& j : jumps) a = std::max(a, j.alpha);
  return a;
}

void SimulationConfig::validate() const {
  if (n < 2) throw std::invalid_argument("simulation config: n must be at least 2");
  if (horizon != 1.0) throw std::invalid_argument("simulation config: horizon is fixed at 1");
}

Mat2 cholesky2(const Mat2& cov) {
  for (const auto& row : cov) {
    for (double v : row) {
      if (!std::isfinite(v)) throw std::invalid_argument("cholesky2: non-finite entry");
    }
  }
  const double a = cov[0][0];
  const double b = cov[0][1];
  const double d = cov[1][1];
  const double asym_tol = kPsdTolerance * std::max(1.0, std::abs(b));
  if (std::abs(cov[0][1] - cov[1][0]) > asym_tol) {
    throw std::invalid_argument("cholesky2: matrix is not symmetric");
  }
  // Eigenvalues of a symmetric 2x2.
  const double half_trace = 0.5 * (a + d);
  const double radius = std::hypot(0.5 * (a - d), b);
  if (half_trace - radius < -kPsdTolerance) {
    throw std::invalid_argument("cholesky2: matrix is not positive semi-definite");
  }

  Mat2 l{{{0.0, 0.0}, {0.0, 0.0}}};
  if (a > kPsdTolerance) {
    l[0][0] = std::sqrt(a);
    l[1][0] = b / l[0][0];
    l[1][1] = std::sqrt(std::max(0.0, d - l[1][0] * l[1][0]));
  } else {
    // First column is rank deficient; b must vanish for a PSD input.
    l[1][1] = std::sqrt(std::max(0.0, d));
  }
  return l;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t path) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(path + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  engine_.seed(seq);
}

double RandomStream::normal() { return normal_(engine_); }

double RandomStream::open_uniform() {
  // 53 random bits, shifted by half an ulp so that 0 and 1 are never hit.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double sample_stable(double alpha, double scale, double dt, RandomStream& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw std::invalid_argument("sample_stable: alpha must lie in (0, 2]");
  }
  if (!(scale >= 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("sample_stable: need scale >= 0 and dt > 0");
  }
  if (scale == 0.0) return 0.0;

  const double v = std::numbers::pi * (rng.open_uniform() - 0.5);
  const double w = -std::log(rng.open_uniform());

  const double step_scale = scale * std::pow(dt, 1.0 / alpha);
  if (alpha == 1.0) return step_scale * std::tan(v);
  // Small alpha raises cos(v) and w to large negative powers; the factors
  // overflow long before the (tiny) step scale is applied, so combine logs.
  const double s = std::sin(alpha * v);
  if (s == 0.0) return 0.0;
  const double log_mag = std::log(step_scale) + std::log(std::abs(s)) -
                         std::log(std::cos(v)) / alpha +
                         (1.0 - alpha) / alpha * (std::log(std::cos((1.0 - alpha) * v)) - std::log(w));
  const double mag = std::min(std::exp(log_mag), std::numeric_limits<double>::max());
  return std::copysign(mag, s);
}

IncrementSample simulate_increments(const LevyModel& model, const SimulationConfig& config) {
  model.validate();
  config.validate();

  const Mat2 l = cholesky2(model.cov);
  const double dt = config.horizon / static_cast<double>(config.n);
  const double sqrt_dt = std::sqrt(dt);

  RandomStream rng(config.seed);
  IncrementSample out;
  out.mesh = dt;
  out.increments.resize(config.n);
  for (auto& inc : out.increments) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    inc[0] = model.drift[0] * dt + sqrt_dt * (l[0][0] * z1);
    inc[1] = model.drift[1] * dt + sqrt_dt * (l[1][0] * z1 + l[1][1] * z2);
    for (const auto& jump : model.jumps) {
      inc[static_cast<std::size_t>(jump.axis - 1)] +=
          sample_stable(jump.alpha, jump.scale, dt, rng);
    }
  }
  return out;
}

Mat2 scaled_realized_covariance(const IncrementSample& sample) {
  if (sample.empty()) throw std::invalid_argument("scaled_realized_covariance: empty sample");
  const double n = static_cast<double>(sample.size());
  Vec2 mean{0.0, 0.0};
  for (const auto& x : sample.increments) {
    mean[0] += x[0];
    mean[1] += x[1];
  }
  mean[0] /= n;
  mean[1] /= n;
  Mat2 c{{{0.0, 0.0}, {0.0, 0.0}}};
  for (const auto& x : sample.increments) {
    const double a = x[0] - mean[0];
    const double b = x[1] - mean[1];
    c[0][0] += a * a;
    c[0][1] += a * b;
    c[1][1] += b * b;
  }
  c[1][0] = c[0][1];
  // n * (sum / n) collapses to the plain sum of squares.
  return c;
}

}  // namespace levycov
