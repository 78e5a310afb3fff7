#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "levycov/config.hpp"
#include "levycov/csv.hpp"
#include "levycov/harness.hpp"

using namespace levycov;
namespace fs = std::filesystem;

namespace {

ExperimentSpec small_figure_spec(std::size_t seeds = 4) {
  auto s = parse_experiment_string(R"({
    "cov": [[2, 1], [1, 1]],
    "jumps": [{"alpha": 0.2, "scale": 0.3, "axis": 1},
              {"alpha": 0.1, "scale": 0.3, "axis": 2}],
    "n": 1000,
    "grid": {"min": 0.1, "max": 50, "points": 120}
  })");
  s.seeds = seed_range(1, seeds);
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("levycov_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("order statistics") {
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK(quantile({1, 2, 3, 4, 5}, 0.25) == 2);
  CHECK(quantile({0, 10}, 0.3) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(quantile({7}, 0.9) == 7);
  CHECK(median_absolute_deviation({1, 2, 3, 4, 100}) == 1);
  CHECK_THROWS(median({}));
}

TEST_CASE("seed range and parallel_for") {
  CHECK(seed_range(5, 3) == std::vector<std::uint64_t>{5, 6, 7});
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  parallel_for(0, [](std::size_t) { FAIL("should not run"); });
}

TEST_CASE("config parsing") {
  const auto s = small_figure_spec();
  CHECK(s.model.c12() == 1.0);
  CHECK(s.model.jumps.size() == 2);
  CHECK(s.model.jumps[1].axis == 2);
  CHECK(s.grid.size() == 120);
  CHECK(s.r == 1.5);  // max alpha <= 1 falls back to 1.5
  CHECK(s.M == 3.0);

  const auto o = parse_experiment_string(R"({
    "cov": [[2, 1], [1, 1]],
    "jumps": [{"alpha": 0.5, "scale": 0.3, "axis": 1}, {"alpha": 1.5, "scale": 0.3, "axis": 2}],
    "seed": 10, "seeds": 3, "c": 0.4, "kappa": 2, "bigC": 1.5, "A": 0.7, "delta": 0.25,
    "grid": {"min": 1, "max": 5, "points": 5, "log": false}, "end_rule": "grid_max"
  })");
  CHECK(o.r == 1.5);
  CHECK(o.seeds == std::vector<std::uint64_t>{10, 11, 12});
  CHECK(o.selector.c == 0.4);
  CHECK(o.selector.kappa == 2.0);
  CHECK(o.selector.bigC == 1.5);
  CHECK(o.selector.A == 0.7);
  CHECK(o.selector.delta == 0.25);
  CHECK(o.selector.end_rule == EndRule::GridMax);
  CHECK(o.grid[1] == 2.0);

  CHECK_THROWS_AS(parse_experiment_string(R"({"cov": [[1, 0], [0, 1]], "bogus": 1})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_string(R"({"n": 5})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_string(R"({"cov": [[1, 2], [3, 1]]})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_string("{not json"), std::invalid_argument);
  CHECK_THROWS_AS(load_experiment("/nonexistent/levycov.json"), std::runtime_error);
}

TEST_CASE("shipped configs load") {
  for (const char* name : {"figure_fv.json", "figure_iv.json", "oracle_start.json", "jump_free.json"}) {
    CAPTURE(name);
    const auto s = load_experiment(fs::path(LEVYCOV_SOURCE_DIR) / "configs" / name);
    CHECK_NOTHROW(s.validate());
  }
}

TEST_CASE("CSV primitives") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.0, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  std::istringstream in("# comment\na,b\n1,2\n3,4\n");
  const auto t = parse_csv(in);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][t.column("b")] == "4");
  CHECK_THROWS(t.column("c"));
}

TEST_CASE("increments CSV round trip") {
  SimulationConfig c;
  c.n = 50;
  c.seed = 3;
  const auto spec = small_figure_spec();
  const auto s = simulate_increments(spec.model, c);
  std::stringstream ss;
  write_increments_csv(ss, s, true);
  const auto back = read_increments_csv(ss);
  CHECK(back.increments == s.increments);
  CHECK(back.mesh == doctest::Approx(1.0 / 50));
}

TEST_CASE("figure experiment") {
  const auto spec = small_figure_spec(6);
  const auto rec = run_figure_experiment(spec);
  CHECK(rec.rows.size() == spec.seeds.size() * spec.grid.size());
  CHECK(rec.selections.size() == spec.seeds.size());
  CHECK(rec.median_estimate.size() == spec.grid.size());
  for (std::size_t i = 0; i < rec.rows.size(); ++i) {
    const auto& r = rec.rows[i];
    CHECK(r.seed == spec.seeds[i / spec.grid.size()]);
    CHECK(r.u == spec.grid[i % spec.grid.size()]);
    CHECK(r.log_diff == doctest::Approx(r.log_anti - r.log_diag).epsilon(1e-12));
    CHECK(r.estimate == doctest::Approx(1000.0 / (2 * r.u * r.u) * r.log_diff).epsilon(1e-12));
  }
  for (std::size_t g = 0; g < spec.grid.size(); ++g) {
    CHECK(rec.q25_estimate[g] <= rec.median_estimate[g]);
    CHECK(rec.median_estimate[g] <= rec.q75_estimate[g]);
  }
  auto bad = spec;
  bad.mode = ExperimentMode::OracleStart;
  CHECK_THROWS(run_figure_experiment(bad));
}

TEST_CASE("figure band medians for the three models") {
  auto fv = load_experiment(fs::path(LEVYCOV_SOURCE_DIR) / "configs" / "figure_fv.json");
  const double m = run_figure_experiment(fv).band_median(5.0, 30.0);
  CHECK(m >= 0.65);
  CHECK(m <= 1.35);

  auto jf = load_experiment(fs::path(LEVYCOV_SOURCE_DIR) / "configs" / "jump_free.json");
  CHECK(std::abs(run_figure_experiment(jf).band_median(5.0, 30.0)) <= 0.1);

  // record only: infinite-variation jumps, no assertion on the level
  auto iv = load_experiment(fs::path(LEVYCOV_SOURCE_DIR) / "configs" / "figure_iv.json");
  MESSAGE("infinite-variation band median: " << run_figure_experiment(iv).band_median(5.0, 30.0));
}

TEST_CASE("reruns are byte-identical without the timestamp line") {
  const auto spec = small_figure_spec(3);
  const auto a = temp_dir("a"), b = temp_dir("b");
  write_figure_csv(a, run_figure_experiment(spec), false);
  write_figure_csv(b, run_figure_experiment(spec), false);
  for (const char* f : {"figure_rows.csv", "figure_summary.csv", "figure_selections.csv"}) {
    CAPTURE(f);
    const auto sa = slurp(a / f);
    CHECK_FALSE(sa.empty());
    CHECK(sa == slurp(b / f));
    CHECK(sa.rfind("#", 0) == std::string::npos);
  }
  const auto c = temp_dir("c");
  write_figure_csv(c, run_figure_experiment(spec), true);
  const auto sc = slurp(c / "figure_rows.csv");
  CHECK(sc.rfind("# generated ", 0) == 0);
  CHECK(sc.substr(sc.find('\n') + 1) == slurp(a / "figure_rows.csv"));
}

TEST_CASE("aggregates recomputed from the row CSV match") {
  const auto spec = small_figure_spec(5);
  const auto rec = run_figure_experiment(spec);
  std::stringstream ss;
  write_figure_rows(ss, rec, true);
  const auto t = parse_csv(ss);
  REQUIRE(t.rows.size() == rec.rows.size());
  const std::size_t cu = t.column("U"), ce = t.column("estimate");
  const std::size_t k = spec.grid.size();
  for (std::size_t g = 0; g < k; ++g) {
    std::vector<double> v;
    for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
      const auto& row = t.rows[s * k + g];
      CHECK(std::stod(row[cu]) == spec.grid[g]);
      v.push_back(std::stod(row[ce]));
    }
    std::sort(v.begin(), v.end());
    const double m = v[v.size() / 2];  // odd seed count
    CHECK(std::abs(m - rec.median_estimate[g]) <= 1e-12);
  }
  std::vector<double> band;
  for (const auto& row : t.rows) {
    const double u = std::stod(row[cu]);
    if (u >= 5.0 && u <= 30.0) band.push_back(std::stod(row[ce]));
  }
  std::sort(band.begin(), band.end());
  const double bm = band.size() % 2 ? band[band.size() / 2]
                                    : 0.5 * (band[band.size() / 2 - 1] + band[band.size() / 2]);
  CHECK(std::abs(bm - rec.band_median(5.0, 30.0)) <= 1e-12);
}

TEST_CASE("seed order and thread count do not matter") {
  auto spec = small_figure_spec(4);
  const auto rec = run_figure_experiment(spec);
  auto one = spec;
  one.seeds = {spec.seeds[2]};
  const auto r1 = run_figure_experiment(one);
  for (std::size_t g = 0; g < spec.grid.size(); ++g) {
    CHECK(r1.rows[g].estimate == rec.rows[2 * spec.grid.size() + g].estimate);
  }
}

TEST_CASE("oracle start experiment") {
  auto spec = load_experiment(fs::path(LEVYCOV_SOURCE_DIR) / "configs" / "oracle_start.json");
  spec.mode = ExperimentMode::OracleStart;
  spec.seeds = seed_range(1, 5);
  const auto recs = run_oracle_start_experiment(spec, {1000, 2000});
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].n == 1000);
  CHECK(recs[1].n == 2000);
  for (const auto& r : recs) {
    CHECK(r.runs.size() == 5);
    CHECK(r.u_bal == doctest::Approx(u_bal_theoretical(static_cast<double>(r.n), spec.r, spec.M, 1.0, 1.0)));
    for (const auto& run : r.runs) {
      CHECK(run.u >= run.start.u_start);
      CHECK(run.curve_u.size() == run.curve_estimate.size());
      CHECK_FALSE(run.curve_u.empty());
      CHECK(run.curve_u.front() == run.start.u_start);
    }
  }
  const auto d = temp_dir("os");
  write_oracle_start_csv(d, recs, false);
  std::ifstream in(d / "oracle_start_runs.csv");
  CHECK(parse_csv(in).rows.size() == 10);
}

TEST_CASE("property suite") {
  auto spec = small_figure_spec(30);
  spec.mode = ExperimentMode::PropertySuite;
  const auto rep = run_property_suite(spec);
  REQUIRE(rep.checks.size() == 4);
  CHECK(rep.check("decomposition").frequency() == 1.0);
  CHECK(rep.check("decomposition").total == 30 * spec.grid.size());
  CHECK(rep.check("envelope").passed());
  CHECK(rep.check("truncation_interchange").total > 0);
  CHECK(rep.check("bound_interchange").total > 0);
  CHECK_THROWS(rep.check("nope"));

  const auto d = temp_dir("prop");
  write_property_csv(d, rep, false);
  std::ifstream in(d / "properties.csv");
  CHECK(parse_csv(in).rows.size() == 4);
}

TEST_CASE("decomposition_holds") {
  CHECK(decomposition_holds(1.5, 1.0, {0.3, 0.2, false}));
  CHECK_FALSE(decomposition_holds(1.5, 1.0, {0.3, 0.1, false}));
  CHECK(decomposition_holds(7.0, 1.0, {0.0, 0.0, true}));
}
