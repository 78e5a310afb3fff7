// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "lepskii_families.hpp"
#include "levycov/harness.hpp"

using namespace levycov;

namespace {

// 1
constexpr double kBandLo = 0.65, kBandHi = 1.35, kBandULo = 5.0, kBandUHi = 30.0;
constexpr double kFigureSeconds = 30.0;
// 2
constexpr double kScaleRatioLo = 1.6, kScaleRatioHi = 2.4;
// 3
constexpr double kDecompositionFloor = 1.0;
// 4
constexpr std::size_t kPropertySeeds = 200;
constexpr double kInterchangeFloor = 0.95;
// 5
constexpr int kEcfSamples = 100, kEcfFrequencies = 10, kEcfMaxN = 16;
constexpr double kEcfTol = 1e-12;
// 6
constexpr int kGaussDraws = 100000, kTailDraws = 1000000;
constexpr double kGaussVarTol = 0.05, kCauchyQuartileTol = 0.03, kTailSlopeTol = 0.3;
// 7
constexpr std::size_t kMinFamilies = 5;
// 8
constexpr int kEnvelopeCurves = 1000, kRateDraws = 50;
constexpr double kRateTol = 1e-12;
// 9
constexpr double kAdaptiveTol = 0.35, kBoundFrequencyFloor = 0.9, kAdaptiveSeconds = 120.0;

constexpr std::size_t kSeeds = 20;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

LevyModel make_model(double a1, double a2) {
  LevyModel m;
  m.cov = {{{2.0, 1.0}, {1.0, 1.0}}};
  m.jumps = {{a1, 0.3, 1}, {a2, 0.3, 2}};
  return m;
}

ExperimentSpec make_spec(const LevyModel& m, std::size_t n, std::size_t seeds) {
  ExperimentSpec s;
  s.model = m;
  s.n = n;
  s.seeds = seed_range(1, seeds);
  s.r = default_cojump_index(m);
  s.M = default_class_constant(m);
  return s;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rec = run_figure_experiment(make_spec(make_model(0.2, 0.1), 1000, kSeeds));
  const double m = rec.band_median(kBandULo, kBandUHi);
  const double secs = elapsed(t0);
  return {m >= kBandLo && m <= kBandHi && secs < kFigureSeconds,
          "band median " + fmt(m) + " in [" + fmt(kBandLo) + ", " + fmt(kBandHi) + "], " +
              fmt(secs) + " s < " + fmt(kFigureSeconds) + " s"};
}

std::vector<double> starts(const LevyModel& m, std::size_t n, const FrequencyGrid& g, double c) {
  std::vector<double> out(kSeeds);
  parallel_for(kSeeds, [&](std::size_t i) {
    SimulationConfig cfg;
    cfg.n = n;
    cfg.seed = i + 1;
    out[i] = oracle_start_empirical(simulate_increments(m, cfg), g, c).u_start;
  });
  return out;
}

Outcome criterion2() {
  const auto g = FrequencyGrid::log_spaced(0.1, 50.0, 500);
  const auto m = make_model(0.2, 0.1);
  const double ratio = median(starts(m, 4000, g, 0.5)) / median(starts(m, 1000, g, 0.5));
  const bool ok_ratio = ratio >= kScaleRatioLo && ratio <= kScaleRatioHi;

  LevyModel jf;
  jf.cov = {{{2.0, 0.0}, {0.0, 1.0}}};
  const auto [lo, hi] = oracle_start_interval(jf, 1000.0, g.points());
  // one grid step outward on each side
  const std::size_t first_in = g.lower_bound_index(lo);
  const std::size_t lo_i = first_in == 0 ? 0 : first_in - 1;
  const std::size_t hi_i = std::min(g.lower_bound_index(hi) + 1, g.last_index());
  const double u = median(starts(jf, 1000, g, 0.5));
  const bool ok_bracket = u >= g[lo_i] && u <= g[hi_i];
  return {ok_ratio && ok_bracket, "median ratio " + fmt(ratio) + " in [" + fmt(kScaleRatioLo) +
                                      ", " + fmt(kScaleRatioHi) + "]; jump-free start " + fmt(u) +
                                      " in [" + fmt(g[lo_i]) + ", " + fmt(g[hi_i]) + "]"};
}

PropertyReport property_report() {
  auto s = make_spec(make_model(0.2, 0.1), 1000, kPropertySeeds);
  s.mode = ExperimentMode::PropertySuite;
  PropertyFloors f;
  f.truncation = kInterchangeFloor;
  f.interchange = kInterchangeFloor;
  f.decomposition = kDecompositionFloor;
  return run_property_suite(s, f);
}

Outcome criterion3(const PropertyReport& r) {
  const auto& c = r.check("decomposition");
  return {c.passed() && c.frequency() >= kDecompositionFloor,
          std::to_string(c.hits) + "/" + std::to_string(c.total) + " (seed, U) pairs"};
}

Outcome criterion4(const PropertyReport& r) {
  const auto& a = r.check("truncation_interchange");
  const auto& b = r.check("bound_interchange");
  return {a.frequency() >= kInterchangeFloor && b.frequency() >= kInterchangeFloor && a.total > 0 &&
              b.total > 0,
          "inverse " + fmt(a.frequency()) + " (" + std::to_string(a.total) + " pts), bound " +
              fmt(b.frequency()) + " (" + std::to_string(b.total) + " pts), floor " +
              fmt(kInterchangeFloor)};
}

Outcome criterion5() {
  using cd = std::complex<double>;
  RandomStream rng(5005, 0);
  double worst = 0.0;
  for (int t = 0; t < kEcfSamples; ++t) {
    const int n = 1 + static_cast<int>(rng.open_uniform() * kEcfMaxN);
    IncrementSample s;
    for (int i = 0; i < n; ++i) s.increments.push_back({3.0 * rng.normal(), 3.0 * rng.normal()});
    s.mesh = 1.0 / n;
    for (int f = 0; f < kEcfFrequencies; ++f) {
      const double u = 50.0 * rng.open_uniform();
      for (auto o : {Orientation::Diag, Orientation::AntiDiag}) {
        const double v2 = o == Orientation::Diag ? u : -u;
        cd direct{0.0, 0.0};
        for (const auto& p : s.increments) direct += std::polar(1.0, u * p[0] + v2 * p[1]);
        direct /= static_cast<double>(n);
        worst = std::max(worst, std::abs(ecf(s, {u, o}).value - direct));
      }
    }
  }
  return {worst <= kEcfTol, "max deviation " + fmt(worst) + " <= " + fmt(kEcfTol)};
}

Outcome criterion6() {
  RandomStream rng(6006, 0);
  const double sigma = 0.8, dt = 1.0;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < kGaussDraws; ++i) {
    const double x = sample_stable(2.0, sigma, dt, rng);
    s1 += x;
    s2 += x * x;
  }
  const double var = s2 / kGaussDraws - (s1 / kGaussDraws) * (s1 / kGaussDraws);
  const double var_err = std::abs(var / (2 * sigma * sigma * dt) - 1.0);

  std::vector<double> c(kGaussDraws);
  for (auto& x : c) x = sample_stable(1.0, sigma, dt, rng);
  const double q1 = quantile(c, 0.25), q3 = quantile(c, 0.75);
  const double q_err = std::max(std::abs(q1 / (-sigma * dt) - 1.0), std::abs(q3 / (sigma * dt) - 1.0));

  std::string tails;
  bool tail_ok = true;
  for (double alpha : {0.5, 1.5}) {
    std::vector<double> a(kTailDraws);
    for (auto& x : a) x = std::abs(sample_stable(alpha, 1.0, 1.0, rng));
    std::sort(a.begin(), a.end());
    std::vector<double> lx, ly;
    for (int k = 0; k <= 10; ++k) {
      const double t = 10.0 * std::pow(10.0, k / 10.0);
      const double frac = static_cast<double>(a.end() - std::upper_bound(a.begin(), a.end(), t)) / kTailDraws;
      lx.push_back(std::log(t));
      ly.push_back(std::log(frac));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i] / lx.size();
      my += ly[i] / ly.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    tail_ok = tail_ok && std::abs(slope + alpha) <= kTailSlopeTol;
    tails += " slope(" + fmt(alpha) + ")=" + fmt(slope);
  }
  return {var_err <= kGaussVarTol && q_err <= kCauchyQuartileTol && tail_ok,
          "var err " + fmt(var_err) + ", quartile err " + fmt(q_err) + "," + tails};
}

Outcome criterion7() {
  std::size_t ok1 = 0, ok2 = 0;
  const auto f1 = lepskii_families::stop_rule();
  const auto f2 = lepskii_families::rate_rule();
  auto est = [](const lepskii_families::Family& f) {
    auto e = as_estimates(f.estimates);
    for (std::size_t i = 0; i < f.degenerate.size(); ++i) e[i].degenerate = f.degenerate[i];
    return e;
  };
  for (const auto& f : f1) {
    const auto r = lepskii_stop_rule(est(f), f.bounds, f.constant);
    ok1 += r.index == f.expected && r.trace.size() == f.expected_comparisons;
  }
  for (const auto& f : f2) {
    const auto r = lepskii_stop_rule_rates(est(f), f.bounds, f.constant);
    ok2 += r.index == f.expected && r.trace.size() == f.expected_comparisons;
  }
  return {ok1 == f1.size() && ok2 == f2.size() && f1.size() >= kMinFamilies && f2.size() >= kMinFamilies,
          "algorithm 1 " + std::to_string(ok1) + "/" + std::to_string(f1.size()) + ", algorithm 2 " +
              std::to_string(ok2) + "/" + std::to_string(f2.size())};
}

Outcome criterion8() {
  RandomStream rng(8008, 0);
  bool env_ok = true;
  for (int t = 0; t < kEnvelopeCurves; ++t) {
    std::vector<double> c(2 + static_cast<std::size_t>(rng.open_uniform() * 60));
    for (auto& v : c) v = rng.normal();
    const auto e = monotone_envelope(c, 0);
    env_ok = env_ok && std::is_sorted(e.begin(), e.end()) && monotone_envelope(e, 0) == e;
  }

  const auto m = make_model(0.5, 1.5);
  BoundParams p;
  p.r = 1.5;
  p.M = default_class_constant(m);
  const double n = 1000.0;
  const auto g = FrequencyGrid::log_spaced(0.1, 50.0, 500);
  std::vector<double> s;
  for (double u : g.points()) s.push_back(stochastic_bound_theo(m, n, u, p));
  const auto start = oracle_start_theoretical(m, n, g, 0.5);
  const auto env = monotone_envelope(s, start.index);
  const std::size_t i = g.nearest_index(optimal_U(n, p.r, p.M));
  const bool supse = env[i] == s[i];

  double worst = 0.0;
  for (int t = 0; t < kRateDraws; ++t) {
    const double nn = 2.0 + 1e6 * rng.open_uniform();
    const double r = 2.0 * rng.open_uniform();
    const double mm = 0.1 + 5.0 * rng.open_uniform();
    const double w = r <= 1.0 ? 1.0 / std::sqrt(nn) : std::exp((r - 2.0) / 2.0 * std::log(nn * std::log(nn)));
    const double un = r <= 1.0 ? std::sqrt(nn) : std::sqrt((r - 1.0) / mm * nn * std::log(nn));
    worst = std::max(worst, std::abs(minimax_rate(nn, r) / w - 1.0));
    worst = std::max(worst, std::abs(optimal_U(nn, r, mm) / un - 1.0));
  }
  return {env_ok && supse && worst <= kRateTol,
          std::string("envelope ") + (env_ok ? "ok" : "broken") + ", s*(U_n)=s(U_n) at U=" +
              fmt(g[i]) + (supse ? " holds" : " fails") + ", rate rel err " + fmt(worst)};
}

Outcome criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  auto s = make_spec(make_model(0.5, 1.5), 1000, kSeeds);
  s.mode = ExperimentMode::OracleStart;
  const auto recs = run_oracle_start_experiment(s, {1000, 5000});
  const double secs = elapsed(t0);
  bool ok = secs < kAdaptiveSeconds;
  std::string d;
  for (const auto& r : recs) {
    ok = ok && std::abs(r.median_estimate() - 1.0) <= kAdaptiveTol &&
         r.bound_frequency() >= kBoundFrequencyFloor;
    d += "n=" + std::to_string(r.n) + ": median " + fmt(r.median_estimate()) + ", MAD " +
         fmt(r.mad_estimate()) + ", bound freq " + fmt(r.bound_frequency()) + "; ";
  }
  ok = ok && recs.size() == 2 && recs[1].mad_estimate() < recs[0].mad_estimate();
  return {ok, d + fmt(secs) + " s < " + fmt(kAdaptiveSeconds) + " s"};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                elapsed(t0));
    std::fflush(stdout);
  };

  report(1, "consistency band", criterion1);
  report(2, "oracle-start sqrt(n) scaling", criterion2);
  PropertyReport props;
  const auto tp = std::chrono::steady_clock::now();
  try {
    props = property_report();
  } catch (const std::exception& e) {
    std::printf("property suite failed: %s\n", e.what());
  }
  std::printf("(property suite over %zu seeds: %.2f s)\n", kPropertySeeds, elapsed(tp));
  report(3, "decomposition inequality", [&] { return criterion3(props); });
  report(4, "truncation interchange", [&] { return criterion4(props); });
  report(5, "ECF oracle equivalence", criterion5);
  report(6, "stable sampler", criterion6);
  report(7, "Lepskii unit traces", criterion7);
  report(8, "envelope and rates", criterion8);
  report(9, "adaptive end-to-end", criterion9);
  return failures == 0 ? 0 : 1;
}
