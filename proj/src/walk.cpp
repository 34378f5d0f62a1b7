#include "segscore/walk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "segscore/cramer.hpp"
#include "segscore/error.hpp"
#include "segscore/parallel.hpp"

namespace segscore {

const char* to_string(Continuation mode) {
  switch (mode) {
    case Continuation::direct:
      return "direct";
    case Continuation::tilted:
      return "tilted";
    case Continuation::automatic:
      return "auto";
  }
  return "?";
}

Continuation parse_continuation(const std::string& text) {
  if (text == "direct") return Continuation::direct;
  if (text == "tilted") return Continuation::tilted;
  if (text == "auto") return Continuation::automatic;
  throw ConfigError("continuation must be direct, tilted or auto; got '" + text + "'");
}

OvershootSampler::OvershootSampler(const StepLaw& law, double gamma)
    : tilted_(law.tilted(gamma)), gamma_(gamma) {}

OvershootSampler::Draw OvershootSampler::sample(double start, double level,
                                                RngStream& rng,
                                                std::int64_t step_budget) const {
  std::int64_t used = 0;
  auto step = [&] {
    if (++used > step_budget) {
      std::ostringstream os;
      os << "tilted continuation exceeded its budget of " << step_budget
         << " steps below level " << level;
      throw HitCapExceeded(os.str());
    }
    return tilted_.sample(rng);
  };

  if (start > 0) {
    double s = start;
    std::int64_t k = 0;
    for (;;) {
      s += step();
      ++k;
      if (s <= 0) break;
      if (s > level) {
        if (rng.uniform() < std::exp(-gamma_ * (s - start))) {
          return Draw{s - level, k, true};
        }
        break;
      }
    }
  }

  for (;;) {
    double s = 0;
    std::int64_t k = 0;
    for (;;) {
      s += step();
      ++k;
      if (s <= 0) break;
      if (s > level) {
        if (rng.uniform() < std::exp(-gamma_ * (s - level))) {
          return Draw{s - level, k, false};
        }
        break;
      }
    }
  }
}

PathSimulator::PathSimulator(StepLaw law, Continuation mode,
                             std::optional<double> gamma)
    : law_(std::move(law)), mode_(mode) {
  gamma_ = gamma ? *gamma : solve_gamma(law_).gamma;
  if (mode_ != Continuation::direct) sampler_.emplace(law_, gamma_);
}

Continuation PathSimulator::mode_for(double level) const {
  if (mode_ != Continuation::automatic) return mode_;
  return gamma_ * level >= kAutoTiltThreshold ? Continuation::tilted
                                              : Continuation::direct;
}

std::int64_t PathSimulator::default_max_steps(std::int64_t n, double level) const {
  // Direct crossing takes on the order of exp(gamma level) excursions.
  const double growth =
      mode_for(level) == Continuation::direct ? std::exp(std::min(gamma_ * level, 40.0)) : 0.0;
  const double extra = std::ceil(50 * (level + growth) / std::abs(law_.mean()));
  return n + static_cast<std::int64_t>(std::min(extra, 1e15));
}

namespace {

void check_path_args(std::int64_t n, double x, double y, std::int64_t max_steps) {
  if (n < 1) throw ConfigError("n must be >= 1");
  if (!(x > 0) || !std::isfinite(x)) throw ConfigError("x must be > 0");
  if (!(y >= 0) || !std::isfinite(y)) throw ConfigError("y must be >= 0");
  if (max_steps < n) throw ConfigError("max_steps must be >= n");
}

[[noreturn]] void throw_cap(std::int64_t max_steps, double level) {
  std::ostringstream os;
  os << "level " << level << " not crossed within max_steps=" << max_steps;
  throw HitCapExceeded(os.str());
}

}  // namespace

TripletSample PathSimulator::run_path(std::int64_t n, double x, double y,
                                      const RngStream& stream,
                                      std::int64_t max_steps) const {
  check_path_args(n, x, y, max_steps);
  const double level = x + y;
  RngStream steps = stream.substream(Lane::steps);

  double r = 0, rstar = 0, over = 0;
  std::int64_t hit = 0;
  for (std::int64_t k = 1; k <= n; ++k) {
    r = reflect_step(r, law_.sample(steps));
    if (r > rstar) rstar = r;
    if (hit == 0 && r > level) {
      hit = k;
      over = r - level;
    }
  }

  TripletSample out;
  out.r_n = r;
  out.q_ny = rstar - y;
  out.n = n;
  out.x = x;
  out.y = y;
  out.stream_index = stream.stream_index();

  if (hit == 0) {
    if (mode_for(level) == Continuation::direct) {
      for (std::int64_t k = n + 1;; ++k) {
        if (k > max_steps) throw_cap(max_steps, level);
        r = reflect_step(r, law_.sample(steps));
        if (r > level) {
          hit = k;
          over = r - level;
          break;
        }
      }
    } else {
      RngStream cont = stream.substream(Lane::continuation);
      const auto draw = sampler_->sample(r, level, cont, max_steps - n);
      over = draw.overshoot;
      hit = n + draw.steps;
      out.hit_exact = draw.in_current_excursion;
    }
  }
  out.o_xy = over;
  out.hit_time = hit;
  return out;
}

double PathSimulator::overshoot(double level, const RngStream& stream,
                                std::int64_t max_steps) const {
  if (!(level > 0) || !std::isfinite(level)) throw ConfigError("level must be > 0");
  if (mode_for(level) == Continuation::direct) {
    RngStream steps = stream.substream(Lane::steps);
    double r = 0;
    for (std::int64_t k = 1; k <= max_steps; ++k) {
      r = reflect_step(r, law_.sample(steps));
      if (r > level) return r - level;
    }
    throw_cap(max_steps, level);
  }
  RngStream cont = stream.substream(Lane::continuation);
  return sampler_->sample(0.0, level, cont, max_steps).overshoot;
}

double PathSimulator::running_max(std::int64_t n, const RngStream& stream) const {
  RngStream steps = stream.substream(Lane::steps);
  double r = 0, rstar = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    r = reflect_step(r, law_.sample(steps));
    if (r > rstar) rstar = r;
  }
  return rstar;
}

TripletSample run_path(const StepLaw& law, std::int64_t n, double x, double y,
                       const RngStream& stream, std::int64_t max_steps) {
  // gamma is unused in direct mode; skip the root solve.
  return PathSimulator(law, Continuation::direct, 1.0)
      .run_path(n, x, y, stream, max_steps);
}

TripletSample run_path_on_steps(const std::vector<double>& steps, std::int64_t n,
                                double x, double y) {
  const std::int64_t len = static_cast<std::int64_t>(steps.size());
  check_path_args(n, x, y, len);
  const double level = x + y;
  double r = 0, rstar = 0, over = 0;
  std::int64_t hit = 0;
  TripletSample out;
  for (std::int64_t k = 1; k <= len; ++k) {
    r = reflect_step(r, steps[k - 1]);
    if (k <= n) rstar = std::max(rstar, r);
    if (k == n) out.r_n = r;
    if (hit == 0 && r > level) {
      hit = k;
      over = r - level;
    }
    if (k >= n && hit != 0) break;
  }
  if (hit == 0) throw_cap(len, level);
  out.q_ny = rstar - y;
  out.o_xy = over;
  out.hit_time = hit;
  out.n = n;
  out.x = x;
  out.y = y;
  return out;
}

std::vector<TripletSample> run_batch(const BatchConfig& cfg) {
  if (cfg.paths < 1) throw ConfigError("paths must be >= 1");
  if (!(cfg.y > 0)) throw ConfigError("y must be > 0");
  const PathSimulator sim(cfg.law, cfg.mode, cfg.gamma);
  const std::int64_t max_steps =
      cfg.max_steps > 0 ? cfg.max_steps : sim.default_max_steps(cfg.n, cfg.x + cfg.y);
  std::vector<TripletSample> out(static_cast<std::size_t>(cfg.paths));
  parallel_for(out.size(), cfg.workers, [&](std::size_t i) {
    try {
      out[i] = sim.run_path(cfg.n, cfg.x, cfg.y, RngStream(cfg.master_seed, i),
                            max_steps);
    } catch (const HitCapExceeded& e) {
      throw HitCapExceeded("path " + std::to_string(i) + ": " + e.what(),
                           static_cast<std::int64_t>(i));
    }
  });
  return out;
}

std::vector<double> overshoot_batch(const PathSimulator& sim, double level,
                                    std::int64_t paths, std::uint64_t master_seed,
                                    unsigned workers, std::int64_t max_steps) {
  if (paths < 1) throw ConfigError("paths must be >= 1");
  if (max_steps <= 0) max_steps = sim.default_max_steps(0, level);
  std::vector<double> out(static_cast<std::size_t>(paths));
  parallel_for(out.size(), workers, [&](std::size_t i) {
    out[i] = sim.overshoot(level, RngStream(master_seed, i), max_steps);
  });
  return out;
}

std::vector<double> running_max_batch(const PathSimulator& sim, std::int64_t n,
                                      std::int64_t paths, std::uint64_t master_seed,
                                      unsigned workers) {
  if (n < 1) throw ConfigError("n must be >= 1");
  if (paths < 1) throw ConfigError("paths must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(paths));
  parallel_for(out.size(), workers, [&](std::size_t i) {
    out[i] = sim.running_max(n, RngStream(master_seed, i));
  });
  return out;
}

void write_triplets_csv(std::ostream& os, const std::vector<TripletSample>& samples) {
  os << "path_id,n,x,y,r_n,q_ny,o_xy,hit_time\n";
  char buf[256];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    std::snprintf(buf, sizeof buf, "%llu,%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%lld\n",
                  static_cast<unsigned long long>(s.stream_index),
                  static_cast<long long>(s.n), s.x, s.y, s.r_n, s.q_ny, s.o_xy,
                  static_cast<long long>(s.hit_time));
    os << buf;
  }
}

}  // namespace segscore
