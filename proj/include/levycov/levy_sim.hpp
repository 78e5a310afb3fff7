#pragma once

// Bivariate Levy increments X = B + J: correlated Brownian part plus
// axis-loaded symmetric alpha-stable jump components.

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace levycov {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Symmetric alpha-stable component acting on one coordinate.
/// Per unit time its characteristic function is exp(-scale^alpha * |v|^alpha).
struct StableComponent {
  double alpha = 1.0;
  double scale = 1.0;
  int axis = 1;  // 1 or 2

  void validate() const;
};

struct LevyModel {
  Mat2 cov{{{0.0, 0.0}, {0.0, 0.0}}};
  Vec2 drift{0.0, 0.0};
  std::vector<StableComponent> jumps;

  /// Throws std::invalid_argument on asymmetric / indefinite covariance or
  /// bad jump components.
  void validate() const;

  /// Sum of all covariance entries, i.e. <C u, u> / U^2 for u = (U, U).
  double c_sum() const;
  /// <C u~, u~> / U^2 for u~ = (U, -U).
  double c_anti() const;
  double c12() const { return cov[0][1]; }

  /// Maximum absolute row sum of the covariance. Axis-loaded components never
  /// jump together, so the co-jump integral of the class bound vanishes and
  /// this is the whole bound.
  double class_bound() const;

  /// Largest stability index among the jump components, 0 when jump-free.
  double max_alpha() const;
};

struct SimulationConfig {
  std::size_t n = 1000;
  double horizon = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct IncrementSample {
  std::vector<Vec2> increments;
  double mesh = 0.0;

  std::size_t size() const { return increments.size(); }
  bool empty() const { return increments.empty(); }
};

/// Lower-triangular L with L L^T = cov. A rank-deficient column is zero.
Mat2 cholesky2(const Mat2& cov);

/// Deterministic random stream. One stream per (seed, path).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t path = 0);

  double normal();
  /// Uniform on the open interval (0, 1).
  double open_uniform();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// One symmetric alpha-stable increment over a step dt via the
/// Chambers-Mallows-Stuck transform. The result has scale scale * dt^(1/alpha).
/// scale == 0 yields 0 without consuming randomness.
double sample_stable(double alpha, double scale, double dt, RandomStream& rng);

/// Increment j = b dt + L sqrt(dt) Z_j + J_j. Per increment the stream is
/// consumed as: two normals, then each jump component in model order.
IncrementSample simulate_increments(const LevyModel& model,
                                    const SimulationConfig& config);

/// n times the (mean-zero) empirical covariance of the increments.
Mat2 scaled_realized_covariance(const IncrementSample& sample);

}  // namespace levycov
