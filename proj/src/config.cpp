#include "levycov/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace levycov {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {"cov",   "drift", "jumps", "n",    "seed", "seeds",
                                          "grid",  "c",     "delta", "kappa", "bigC", "A",
                                          "r",     "M",     "end_rule"};

Mat2 read_matrix(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 ||
      !j[1].is_array() || j[1].size() != 2) {
    throw std::invalid_argument("config: cov must be a 2x2 array");
  }
  return {{{j[0][0].get<double>(), j[0][1].get<double>()},
           {j[1][0].get<double>(), j[1][1].get<double>()}}};
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

ExperimentSpec parse_experiment(std::istream& is) {
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  for (const auto& item : j.items()) {
    if (!kKnownKeys.contains(item.key())) {
      throw std::invalid_argument("config: unknown key '" + item.key() + "'");
    }
  }

  ExperimentSpec spec;
  try {
    if (!j.contains("cov")) throw std::invalid_argument("config: missing key 'cov'");
    spec.model.cov = read_matrix(j.at("cov"));
    if (j.contains("drift")) {
      const auto& d = j.at("drift");
      if (!d.is_array() || d.size() != 2) throw std::invalid_argument("config: drift must have two entries");
      spec.model.drift = {d[0].get<double>(), d[1].get<double>()};
    }
    if (j.contains("jumps")) {
      for (const auto& jc : j.at("jumps")) {
        StableComponent c;
        c.alpha = jc.at("alpha").get<double>();
        c.scale = jc.at("scale").get<double>();
        c.axis = jc.at("axis").get<int>();
        spec.model.jumps.push_back(c);
      }
    }
    spec.n = get_or<std::size_t>(j, "n", spec.n);
    const auto seed = get_or<std::uint64_t>(j, "seed", 0);
    spec.seeds = seed_range(seed, get_or<std::size_t>(j, "seeds", 1));

    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      const double lo = get_or(g, "min", 0.1);
      const double hi = get_or(g, "max", 50.0);
      const auto points = get_or<std::size_t>(g, "points", 500);
      spec.grid = get_or(g, "log", true) ? FrequencyGrid::log_spaced(lo, hi, points)
                                         : FrequencyGrid::linear(lo, hi, points);
    }

    spec.selector.c = get_or(j, "c", spec.selector.c);
    spec.selector.delta = get_or(j, "delta", spec.selector.delta);
    spec.selector.kappa = get_or(j, "kappa", spec.selector.kappa);
    spec.selector.bigC = get_or(j, "bigC", spec.selector.bigC);
    spec.selector.A = get_or(j, "A", spec.selector.A);
    const auto end_rule = get_or<std::string>(j, "end_rule", "untruncated");
    if (end_rule == "untruncated") {
      spec.selector.end_rule = EndRule::LastUntruncated;
    } else if (end_rule == "grid_max") {
      spec.selector.end_rule = EndRule::GridMax;
    } else {
      throw std::invalid_argument("config: end_rule must be 'untruncated' or 'grid_max'");
    }
    spec.r = get_or(j, "r", default_cojump_index(spec.model));
    spec.M = get_or(j, "M", default_class_constant(spec.model));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }

  spec.model.validate();
  return spec;
}

ExperimentSpec parse_experiment_string(const std::string& text) {
  std::istringstream is(text);
  return parse_experiment(is);
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  try {
    return parse_experiment(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

SimulationConfig first_simulation(const ExperimentSpec& spec) {
  SimulationConfig c;
  c.n = spec.n;
  c.seed = spec.seeds.front();
  return c;
}

}  // namespace levycov
