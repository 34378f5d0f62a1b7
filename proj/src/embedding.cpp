#include "segscore/embedding.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "segscore/error.hpp"
#include "segscore/parallel.hpp"

namespace segscore {

namespace {

constexpr double kInversionLimit = 10.0;

std::int64_t poisson_inversion(double mean, RngStream& rng) {
  const double u = rng.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::int64_t k = 0;
  while (u >= cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    if (p == 0 && cdf < u) break;  // u beyond the representable tail
  }
  return k;
}

std::int64_t poisson_ptrs(double mean, RngStream& rng) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

}  // namespace

std::int64_t sample_poisson(double mean, RngStream& rng) {
  if (!(mean >= 0) || !std::isfinite(mean)) throw ConfigError("Poisson mean must be >= 0");
  if (mean == 0) return 0;
  return mean <= kInversionLimit ? poisson_inversion(mean, rng) : poisson_ptrs(mean, rng);
}

const char* poisson_method(double mean) {
  return mean <= kInversionLimit ? "inversion" : "ptrs";
}

EmbeddedSample embed_path(const PathSimulator& sim, double t, double x,
                          const RngStream& stream, std::int64_t max_steps) {
  if (!(t > 0) || !std::isfinite(t)) throw ConfigError("t must be > 0");
  if (!(x > 0) || !std::isfinite(x)) throw ConfigError("x must be > 0");
  RngStream clock = stream.substream(Lane::auxiliary);
  RngStream steps = stream.substream(Lane::steps);
  const StepLaw& law = sim.law();

  EmbeddedSample out;
  out.t = t;
  out.x = x;
  out.stream_index = stream.stream_index();
  out.n_of_t = sample_poisson(t, clock);

  double r = 0, rstar = 0;
  for (std::int64_t k = 1; k <= out.n_of_t; ++k) {
    r = reflect_step(r, law.sample(steps));
    if (r > rstar) rstar = r;
    if (out.tau_hit_index == 0 && r > x) {
      out.tau_hit_index = k;
      out.z_x = r - x;
    }
  }
  out.y_t = r;
  out.ystar_t = rstar;
  if (out.tau_hit_index != 0) return out;

  const std::int64_t budget = std::max<std::int64_t>(max_steps - out.n_of_t, 1);
  if (sim.mode_for(x) == Continuation::direct) {
    for (std::int64_t k = out.n_of_t + 1;; ++k) {
      if (k > out.n_of_t + budget) {
        std::ostringstream os;
        os << "embedded path did not cross level " << x << " within " << budget
           << " steps after N(t)";
        throw HitCapExceeded(os.str());
      }
      r = reflect_step(r, law.sample(steps));
      if (r > x) {
        out.tau_hit_index = k;
        out.z_x = r - x;
        return out;
      }
    }
  }
  RngStream cont = stream.substream(Lane::continuation);
  const auto draw = OvershootSampler(law, sim.gamma()).sample(r, x, cont, budget);
  out.z_x = draw.overshoot;
  out.tau_hit_index = out.n_of_t + draw.steps;
  out.hit_exact = draw.in_current_excursion;
  return out;
}

std::vector<EmbeddedSample> embed_batch(const PathSimulator& sim, double t, double x,
                                        std::int64_t paths, std::uint64_t master_seed,
                                        unsigned workers, std::int64_t max_steps) {
  if (paths < 1) throw ConfigError("paths must be >= 1");
  if (max_steps <= 0) {
    // N(t) rarely exceeds t + 10 sqrt(t).
    const auto horizon = static_cast<std::int64_t>(std::ceil(t + 10 * std::sqrt(t) + 10));
    max_steps = sim.default_max_steps(horizon, x);
  }
  std::vector<EmbeddedSample> out(static_cast<std::size_t>(paths));
  parallel_for(out.size(), workers, [&](std::size_t i) {
    try {
      out[i] = embed_path(sim, t, x, RngStream(master_seed, i), max_steps);
    } catch (const HitCapExceeded& e) {
      throw HitCapExceeded("path " + std::to_string(i) + ": " + e.what(),
                           static_cast<std::int64_t>(i));
    }
  });
  return out;
}

void write_embedded_csv(std::ostream& os, const std::vector<EmbeddedSample>& samples) {
  os << "path_id,t,x,n_of_t,y_t,ystar_t,z_x,tau_hit_index\n";
  char buf[256];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%lld,%.17g,%.17g,%.17g,%lld\n",
                  static_cast<unsigned long long>(s.stream_index), s.t, s.x,
                  static_cast<long long>(s.n_of_t), s.y_t, s.ystar_t, s.z_x,
                  static_cast<long long>(s.tau_hit_index));
    os << buf;
  }
}

ZinfReport verify_zinf(const PathSimulator& sim, const ZinfConfig& cfg) {
  if (cfg.v_grid.empty()) throw ConfigError("v grid is empty");
  const auto samples =
      embed_batch(sim, cfg.t, cfg.level_x, cfg.paths, cfg.master_seed, cfg.workers);
  const SpitzerSeries series(sim.law(), cfg.series, solve_gamma(sim.law()));
  const auto transforms = series.laplace_O(cfg.v_grid);

  ZinfReport rep;
  rep.paths = cfg.paths;
  rep.level_x = cfg.level_x;
  rep.threshold = cfg.threshold;
  const double m = static_cast<double>(samples.size());
  for (std::size_t k = 0; k < cfg.v_grid.size(); ++k) {
    const double v = cfg.v_grid[k];
    double sum = 0, sq = 0;
    for (const auto& s : samples) {
      const double e = std::exp(-v * s.z_x);
      sum += e;
      sq += e * e;
    }
    ZinfPoint p;
    p.v = v;
    p.empirical = sum / m;
    p.empirical_stderr =
        m > 1 ? std::sqrt(std::max(0.0, (sq / m - p.empirical * p.empirical) / (m - 1))) : 0;
    p.series = transforms[k].value.real();
    p.series_stderr = transforms[k].mc_stderr;
    p.tail_bound = transforms[k].tail_bound;
    p.gap = std::abs(p.empirical - p.series);
    p.budget = 3 * std::hypot(p.empirical_stderr, p.series_stderr) + p.tail_bound;
    p.within_budget = p.gap <= p.budget;
    rep.max_gap = std::max(rep.max_gap, p.gap);
    rep.points.push_back(p);
  }
  rep.pass = rep.max_gap < rep.threshold;
  return rep;
}

nlohmann::json to_json(const ZinfReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"v", p.v},
                   {"empirical", p.empirical},
                   {"empirical_stderr", p.empirical_stderr},
                   {"series", p.series},
                   {"series_stderr", p.series_stderr},
                   {"tail_bound", p.tail_bound},
                   {"gap", p.gap},
                   {"budget", p.budget},
                   {"within_budget", p.within_budget}});
  }
  return {{"points", pts},         {"max_gap", r.max_gap}, {"threshold", r.threshold},
          {"pass", r.pass},        {"paths", r.paths},     {"level_x", r.level_x}};
}

}  // namespace segscore
