#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "segscore/embedding.hpp"
#include "segscore/error.hpp"
#include "segscore/stat_tests.hpp"

using namespace segscore;

namespace {

const StepLaw kGauss(GaussianDrift{-0.5, 1});

void poisson_moments(double mean, int draws, std::uint64_t seed) {
  RngStream rng(seed, 0);
  double s1 = 0, s2 = 0;
  for (int i = 0; i < draws; ++i) {
    const auto k = static_cast<double>(sample_poisson(mean, rng));
    s1 += k;
    s2 += k * k;
  }
  const double m = s1 / draws;
  const double var = s2 / draws - m * m;
  CHECK(std::abs(m - mean) < 3 * std::sqrt(mean / draws));
  // Var of the sample variance is about 2 mean^2 / draws + mean / draws.
  CHECK(std::abs(var - mean) < 4 * std::sqrt((2 * mean * mean + mean) / draws));
}

}  // namespace

TEST_CASE("Poisson sampler") {
  CHECK(std::string(poisson_method(10)) == "inversion");
  CHECK(std::string(poisson_method(10.5)) == "ptrs");
  RngStream rng(1, 0);
  CHECK(sample_poisson(0, rng) == 0);
  CHECK_THROWS_AS(sample_poisson(-1, rng), ConfigError);

  poisson_moments(0.7, 100000, 2);
  poisson_moments(9.5, 100000, 3);
  poisson_moments(50, 100000, 4);
  poisson_moments(2000, 100000, 5);
  poisson_moments(1e6, 50000, 6);

  RngStream z(7, 0);
  int zeros = 0;
  const int m = 100000;
  for (int i = 0; i < m; ++i) zeros += sample_poisson(1.0, z) == 0;
  const double p0 = std::exp(-1.0);
  CHECK(std::abs(zeros / double(m) - p0) < 4 * std::sqrt(p0 * (1 - p0) / m));
}

TEST_CASE("clock mean at t = 50") {
  const PathSimulator sim(kGauss, Continuation::automatic);
  const auto s = embed_batch(sim, 50, 3, 10000, 11, 1);
  double sum = 0;
  for (const auto& e : s) sum += static_cast<double>(e.n_of_t);
  CHECK(std::abs(sum / 1e4 - 50) <= 3 * std::sqrt(50.0) / 100);
}

TEST_CASE("embedded overshoot is the walk overshoot path by path") {
  const PathSimulator sim(kGauss, Continuation::direct);
  for (double x : {0.5, 2.0, 4.0}) {
    for (std::uint64_t i = 0; i < 300; ++i) {
      const RngStream stream(21, i);
      const auto e = embed_path(sim, 40, x, stream, 10000000);
      const auto w = sim.run_path(1, x, 0, stream, 10000000);
      REQUIRE(e.z_x == w.o_xy);
      REQUIRE(e.tau_hit_index == w.hit_time);
      CHECK(e.hit_exact);
    }
  }
}

TEST_CASE("Y and Y* recomputed from the step lane") {
  const PathSimulator sim(kGauss, Continuation::automatic);
  for (std::uint64_t i = 0; i < 200; ++i) {
    const RngStream stream(31, i);
    const auto e = embed_path(sim, 100, 25, stream, 100000000);
    RngStream steps = stream.substream(Lane::steps);
    double r = 0, rstar = 0;
    for (std::int64_t k = 0; k < e.n_of_t; ++k) {
      r = reflect_step(r, kGauss.sample(steps));
      rstar = std::max(rstar, r);
    }
    CHECK(e.y_t == r);
    CHECK(e.ystar_t == rstar);
    CHECK(e.y_t <= e.ystar_t);
    CHECK(e.z_x > 0);
    CHECK(e.tau_hit_index > e.n_of_t);
  }
}

TEST_CASE("Y(t) is stochastically increasing in t") {
  const PathSimulator sim(kGauss, Continuation::automatic);
  const std::int64_t m = 20000;
  const auto early = embed_batch(sim, 500, 25, m, 41, 1);
  const auto late = embed_batch(sim, 2000, 25, m, 42, 1);
  std::vector<double> ye, yl;
  for (const auto& e : early) ye.push_back(e.y_t);
  for (const auto& e : late) yl.push_back(e.y_t);
  for (int k = 0; k < 50; ++k) {
    const double w = 0.1 * k;
    const double fe = ecdf(ye, w), fl = ecdf(yl, w);
    const double se = std::sqrt((fe * (1 - fe) + fl * (1 - fl)) / static_cast<double>(m));
    CHECK(fl <= fe + 3 * se);
  }
  // Started empty, Y(5) is visibly smaller than Y(2000).
  std::vector<double> yshort;
  for (const auto& e : embed_batch(sim, 5, 25, m, 43, 1)) yshort.push_back(e.y_t);
  CHECK(ecdf(yshort, 0) > ecdf(yl, 0) + 0.02);
}

TEST_CASE("embedding is deterministic across worker counts") {
  const PathSimulator sim(kGauss, Continuation::automatic);
  std::ostringstream a, b;
  write_embedded_csv(a, embed_batch(sim, 200, 25, 500, 3, 1));
  write_embedded_csv(b, embed_batch(sim, 200, 25, 500, 3, 4));
  CHECK(a.str() == b.str());
}

TEST_CASE("embedded CSV schema") {
  const PathSimulator sim(kGauss, Continuation::automatic);
  std::ostringstream os;
  write_embedded_csv(os, embed_batch(sim, 10, 2, 3, 1, 1));
  const std::string text = os.str();
  CHECK(text.rfind("path_id,t,x,n_of_t,y_t,ystar_t,z_x,tau_hit_index\n0,10,2,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("argument validation") {
  const PathSimulator sim(kGauss, Continuation::automatic);
  const RngStream s(1, 0);
  CHECK_THROWS_AS(embed_path(sim, 0, 1, s, 100), ConfigError);
  CHECK_THROWS_AS(embed_path(sim, 1, 0, s, 100), ConfigError);
  CHECK_THROWS_AS(embed_batch(sim, 1, 1, 0, 1, 1), ConfigError);
}

TEST_CASE("Z(x) Laplace transform against the series") {
  {
    // Exponential upward jumps: the overshoot is Exp(lambda) at every level.
    const StepLaw law(ExpMinusDrift{1, 2});
    const PathSimulator sim(law, Continuation::automatic);
    ZinfConfig cfg;
    cfg.v_grid = {0, 0.5, 2};
    cfg.paths = 20000;
    cfg.level_x = 10;
    cfg.series.estimator = Estimator{EstimatorKind::monte_carlo, 20000, 3, 1};
    const auto r = verify_zinf(sim, cfg);
    CHECK(r.pass);
    CHECK(r.points[0].gap == 0);
    for (const auto& p : r.points) {
      const double exact = 1 / (1 + p.v);
      CHECK(std::abs(p.empirical - exact) < 4 * p.empirical_stderr + 1e-15);
      CHECK(std::abs(p.series - exact) < 4 * p.series_stderr + p.tail_bound + 1e-12);
    }
  }
  {
    const PathSimulator sim(kGauss, Continuation::automatic);
    ZinfConfig cfg;
    cfg.v_grid = {0, 1};
    cfg.paths = 20000;
    cfg.series.estimator = Estimator{EstimatorKind::monte_carlo, 20000, 5, 1};
    const auto r = verify_zinf(sim, cfg);
    CHECK(r.points[0].gap == 0);
    CHECK(r.points[1].within_budget);
    CHECK(r.max_gap < 0.01);
    const auto j = to_json(r);
    CHECK(j["points"].size() == 2);
    CHECK(j.contains("max_gap"));
  }
}
