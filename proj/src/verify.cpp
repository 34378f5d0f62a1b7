#include "segscore/verify.hpp"

#include <algorithm>
#include <cmath>

#include "segscore/error.hpp"
#include "segscore/lattice.hpp"
#include "segscore/parallel.hpp"

namespace segscore {

namespace {

void require_paths(std::int64_t paths) {
  if (paths < 1) throw ConfigError("paths must be >= 1");
}

nlohmann::json ks_json_with_critical(const KsReport& ks, double critical) {
  auto j = to_json(ks);
  j["critical_5pct"] = critical;
  return j;
}

}  // namespace

std::vector<double> linear_grid(double lo, double hi, std::int64_t points) {
  if (points < 1) throw ConfigError("grid needs at least one point");
  if (!(lo <= hi)) throw ConfigError("grid bounds must satisfy lo <= hi");
  std::vector<double> out(static_cast<std::size_t>(points));
  if (points == 1) {
    out[0] = lo;
    return out;
  }
  for (std::int64_t k = 0; k < points; ++k) {
    out[static_cast<std::size_t>(k)] =
        lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  out.back() = hi;
  return out;
}

FactorizationReport verify_factorization(const StepLaw& law, const FactorizationConfig& cfg,
                                         const RunSettings& run) {
  require_paths(cfg.paths);
  BatchConfig b{law};
  b.n = cfg.n;
  b.x = cfg.x;
  b.y = cfg.y;
  b.paths = cfg.paths;
  b.master_seed = run.seed;
  b.mode = run.mode;
  b.workers = run.workers;
  const double gamma = solve_gamma(law).gamma;
  b.gamma = gamma;

  FactorizationReport rep;
  rep.gamma = gamma;
  rep.samples = run_batch(b);
  std::vector<double> scaled;
  scaled.reserve(rep.samples.size());
  for (const auto& s : rep.samples) scaled.push_back(gamma * (s.r_n + s.o_xy));
  rep.ks = ks_test(scaled, exp1_cdf, cfg.threshold, "exp1");
  rep.critical_5pct = ks_threshold(scaled.size());
  return rep;
}

nlohmann::json FactorizationReport::to_json() const {
  auto j = ks_json_with_critical(ks, critical_5pct);
  j["gamma"] = gamma;
  return j;
}

IndependenceCheck verify_independence(const StepLaw& law, const IndependenceConfig& cfg,
                                      const RunSettings& run) {
  require_paths(cfg.paths);
  BatchConfig b{law};
  b.n = cfg.n;
  b.x = cfg.x;
  b.y = cfg.y;
  b.paths = cfg.paths;
  b.master_seed = run.seed;
  b.mode = run.mode;
  b.workers = run.workers;

  IndependenceCheck out;
  out.samples = run_batch(b);
  IndependenceOptions opt;
  opt.n_boot = cfg.n_boot;
  // Permutations draw from the auxiliary lane, disjoint from the path streams.
  opt.boot_seed = run.seed;
  opt.workers = run.workers;
  const auto coords = triplet_coordinates(out.samples);
  out.report = independence_test(coords, opt);
  out.max_abs = cfg.max_abs;
  out.pass = out.report.pass && out.report.sup_diff < cfg.max_abs;
  return out;
}

nlohmann::json IndependenceCheck::to_json() const {
  auto j = segscore::to_json(report);
  j["bootstrap_pass"] = report.pass;
  j["max_abs"] = max_abs;
  j["pass"] = pass;
  return j;
}

GumbelCheck verify_gumbel(const StepLaw& law, const GumbelConfig& cfg, const RunSettings& run) {
  require_paths(cfg.paths);
  if (cfg.n < 1) throw ConfigError("n must be >= 1");
  const PathSimulator sim(law, Continuation::direct, solve_gamma(law).gamma);
  GumbelCheck out;
  out.gamma = sim.gamma();
  out.n = cfg.n;
  out.rstar = running_max_batch(sim, cfg.n, cfg.paths, run.seed, run.workers);
  out.report = gumbel_test(out.rstar, out.gamma, cfg.n, cfg.threshold);
  out.critical_5pct = ks_threshold(out.rstar.size());
  return out;
}

nlohmann::json GumbelCheck::to_json() const {
  auto j = segscore::to_json(report);
  j["gamma"] = gamma;
  j["n"] = n;
  j["critical_5pct"] = critical_5pct;
  return j;
}

OvershootLimitCheck verify_overshoot_limit(const StepLaw& law,
                                           const OvershootLimitConfig& cfg,
                                           const RunSettings& run) {
  require_paths(cfg.paths);
  const PathSimulator sim(law, run.mode);
  OvershootLimitCheck out;
  out.level_a = cfg.level_a;
  out.level_b = cfg.level_b;
  out.overshoot_a = overshoot_batch(sim, cfg.level_a, cfg.paths, run.seed, run.workers);
  out.overshoot_b = overshoot_batch(sim, cfg.level_b, cfg.paths, run.seed + 1, run.workers);
  out.ks = two_sample_ks(out.overshoot_a, out.overshoot_b, cfg.threshold);
  out.critical_5pct = two_sample_ks(out.overshoot_a, out.overshoot_b).threshold;
  return out;
}

nlohmann::json OvershootLimitCheck::to_json() const {
  auto j = ks_json_with_critical(ks, critical_5pct);
  j["level_a"] = level_a;
  j["level_b"] = level_b;
  return j;
}

OracleCheck verify_oracle(const StepLaw& law, const OracleConfig& cfg, const RunSettings& run) {
  require_paths(cfg.paths);
  if (cfg.n < 1) throw ConfigError("n must be >= 1");
  const LatticePmf exact = law_of_Rn(lattice_step_pmf(law), cfg.n);

  std::vector<std::int64_t> finals(static_cast<std::size_t>(cfg.paths));
  parallel_for(finals.size(), run.workers, [&](std::size_t i) {
    RngStream rng(run.seed, i);
    double r = 0;
    for (std::int64_t k = 0; k < cfg.n; ++k) r = reflect_step(r, law.sample(rng));
    finals[i] = std::llround(r);
  });

  const std::int64_t lo = exact.offset;
  const std::int64_t hi = exact.offset + static_cast<std::int64_t>(exact.probs.size()) - 1;
  std::vector<std::int64_t> counts(exact.probs.size(), 0);
  for (auto v : finals) {
    if (v < lo || v > hi) throw Error("simulated R_n outside the exact support");
    ++counts[static_cast<std::size_t>(v - lo)];
  }

  OracleCheck out;
  out.pass = true;
  const double m = static_cast<double>(cfg.paths);
  std::int64_t cum = 0;
  for (std::int64_t v = lo; v <= hi; ++v) {
    cum += counts[static_cast<std::size_t>(v - lo)];
    OracleCheck::Point p;
    p.value = v;
    p.exact_cdf = std::min(1.0, exact.cdf(v));
    p.mc_cdf = static_cast<double>(cum) / m;
    p.stderr_binomial = std::sqrt(p.exact_cdf * (1 - p.exact_cdf) / m);
    p.tolerance = std::max(3 * p.stderr_binomial, cfg.floor);
    const double diff = std::abs(p.mc_cdf - p.exact_cdf);
    p.ok = diff <= p.tolerance;
    out.pass = out.pass && p.ok;
    out.max_abs_diff = std::max(out.max_abs_diff, diff);
    out.points.push_back(p);
  }
  return out;
}

nlohmann::json OracleCheck::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    pts.push_back({{"value", p.value},
                   {"exact_cdf", p.exact_cdf},
                   {"mc_cdf", p.mc_cdf},
                   {"stderr", p.stderr_binomial},
                   {"tolerance", p.tolerance},
                   {"ok", p.ok}});
  }
  return {{"points", pts}, {"max_abs_diff", max_abs_diff}, {"pass", pass}};
}

SpitzerCfCheck verify_spitzer_cf(const StepLaw& law, const SpitzerCfConfig& cfg,
                                 const RunSettings& run) {
  require_paths(cfg.paths);
  const auto thetas = cfg.thetas.empty() ? linear_grid(-5, 5, 41) : cfg.thetas;
  const auto cramer = solve_gamma(law);
  const PathSimulator sim(law, run.mode, cramer.gamma);
  const auto o = overshoot_batch(sim, cfg.level, cfg.paths, run.seed, run.workers);
  const SpitzerSeries series(law, cfg.series, cramer);
  const auto evals = series.cf_O(thetas);

  SpitzerCfCheck out;
  out.tail_bound = series.tail_bound();
  out.n_terms = series.n_terms();
  const double m = static_cast<double>(o.size());
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    std::complex<double> sum = 0;
    for (double v : o) sum += std::polar(1.0, thetas[k] * v);
    SpitzerCfCheck::Point p;
    p.theta = thetas[k];
    p.series = evals[k].value;
    p.empirical = sum / m;
    p.diff = std::abs(p.series - p.empirical);
    p.mc_stderr = evals[k].mc_stderr;
    out.sup_diff = std::max(out.sup_diff, p.diff);
    out.points.push_back(p);
  }
  out.pass = out.sup_diff < cfg.threshold && out.tail_bound < cfg.max_tail;
  return out;
}

nlohmann::json SpitzerCfCheck::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    pts.push_back({{"theta", p.theta},
                   {"series_re", p.series.real()},
                   {"series_im", p.series.imag()},
                   {"empirical_re", p.empirical.real()},
                   {"empirical_im", p.empirical.imag()},
                   {"diff", p.diff},
                   {"mc_stderr", p.mc_stderr}});
  }
  return {{"points", pts},         {"sup_diff", sup_diff}, {"tail_bound", tail_bound},
          {"n_terms", n_terms},    {"pass", pass}};
}

}  // namespace segscore
