#pragma once

// JSON experiment files. Recognised keys:
//   cov [[c11,c12],[c21,c22]], drift [b1,b2], jumps [{alpha, scale, axis}],
//   n, seed, seeds (count, consecutive from seed), grid {min, max, points, log},
//   c, delta, kappa, bigC, A, r, M, end_rule ("untruncated" | "grid_max").
// Unknown keys are rejected.

#include <filesystem>
#include <istream>
#include <string>

#include "levycov/harness.hpp"

namespace levycov {

ExperimentSpec parse_experiment(std::istream& is);
ExperimentSpec parse_experiment_string(const std::string& text);
ExperimentSpec load_experiment(const std::filesystem::path& path);

/// The simulation setup of the experiment for its first seed.
SimulationConfig first_simulation(const ExperimentSpec& spec);

}  // namespace levycov
