#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "segscore/embedding.hpp"
#include "segscore/spitzer.hpp"
#include "segscore/stat_tests.hpp"
#include "segscore/walk.hpp"

namespace segscore {

/// End-to-end checks of the limit laws. Each check simulates with its own
/// master seed, returns a report with a pass flag, and keeps the raw samples
/// it tested so they can be written out for plotting.

struct RunSettings {
  std::uint64_t seed = 42;
  unsigned workers = 0;
  Continuation mode = Continuation::automatic;
};

// gamma (R_n + O_{x+y}) ~ Exp(1).
struct FactorizationConfig {
  std::int64_t n = 2000;
  double x = 12.5;
  double y = 12.5;
  std::int64_t paths = 100000;
  double threshold = 0.01;
};
struct FactorizationReport {
  KsReport ks;
  double gamma = 0;
  double critical_5pct = 0;
  std::vector<TripletSample> samples;
  nlohmann::json to_json() const;
};
FactorizationReport verify_factorization(const StepLaw& law, const FactorizationConfig& cfg,
                                         const RunSettings& run);

struct IndependenceConfig {
  std::int64_t n = 2000;
  double x = 13;
  double y = 12;
  std::int64_t paths = 100000;
  std::int64_t n_boot = 200;
  double max_abs = 0.02;
};
struct IndependenceCheck {
  IndependenceReport report;
  double max_abs = 0;
  bool pass = false;
  std::vector<TripletSample> samples;
  nlohmann::json to_json() const;
};
IndependenceCheck verify_independence(const StepLaw& law, const IndependenceConfig& cfg,
                                      const RunSettings& run);

struct GumbelConfig {
  std::int64_t n = 10000;
  std::int64_t paths = 10000;
  double threshold = 0.02;
};
struct GumbelCheck {
  GumbelReport report;
  double gamma = 0;
  double critical_5pct = 0;
  std::int64_t n = 0;
  std::vector<double> rstar;
  nlohmann::json to_json() const;
};
GumbelCheck verify_gumbel(const StepLaw& law, const GumbelConfig& cfg, const RunSettings& run);

struct OvershootLimitConfig {
  double level_a = 10;
  double level_b = 25;
  std::int64_t paths = 100000;
  double threshold = 0.01;
};
struct OvershootLimitCheck {
  KsReport ks;
  double critical_5pct = 0;
  double level_a = 0, level_b = 0;
  std::vector<double> overshoot_a, overshoot_b;
  nlohmann::json to_json() const;
};
/// Level a uses master seed `seed`, level b uses `seed + 1`.
OvershootLimitCheck verify_overshoot_limit(const StepLaw& law,
                                           const OvershootLimitConfig& cfg,
                                           const RunSettings& run);

// Monte Carlo law of R_n against the exact lattice DP.
struct OracleConfig {
  std::int64_t n = 20;
  std::int64_t paths = 100000;
  double floor = 0.005;
};
struct OracleCheck {
  struct Point {
    std::int64_t value;
    double exact_cdf;
    double mc_cdf;
    double stderr_binomial;
    double tolerance;
    bool ok;
  };
  std::vector<Point> points;
  double max_abs_diff = 0;
  bool pass = false;
  nlohmann::json to_json() const;
};
OracleCheck verify_oracle(const StepLaw& law, const OracleConfig& cfg, const RunSettings& run);

// Spitzer-type CF of O_inf against the empirical CF of overshoot samples.
struct SpitzerCfConfig {
  std::vector<double> thetas;  // empty: 41 points on [-5, 5]
  double level = 25;
  std::int64_t paths = 100000;
  SeriesConfig series;
  double threshold = 0.02;
  double max_tail = 1e-6;
};
struct SpitzerCfCheck {
  struct Point {
    double theta;
    std::complex<double> series;
    std::complex<double> empirical;
    double diff;
    double mc_stderr;
  };
  std::vector<Point> points;
  double sup_diff = 0;
  double tail_bound = 0;
  std::int64_t n_terms = 0;
  bool pass = false;
  nlohmann::json to_json() const;
};
/// Overshoots use master seed `seed`; series terms use series.estimator's seed.
SpitzerCfCheck verify_spitzer_cf(const StepLaw& law, const SpitzerCfConfig& cfg,
                                 const RunSettings& run);

/// Evenly spaced grid of `points` values on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, std::int64_t points);

}  // namespace segscore
