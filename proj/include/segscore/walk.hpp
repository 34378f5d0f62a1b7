#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "segscore/rng.hpp"
#include "segscore/step_law.hpp"

namespace segscore {

/// One path's realisation of the three segmental-score statistics:
/// the reflected walk R_n, the running-maximum exceedance Q_{n,y} = R*_n - y
/// and the overshoot O_{x+y} = R_{H(x+y)} - (x+y) at the first k with
/// R_k > x + y.
struct TripletSample {
  double r_n = 0;
  double q_ny = 0;
  double o_xy = 0;
  std::int64_t hit_time = 0;
  std::int64_t n = 0;
  double x = 0;
  double y = 0;
  std::uint64_t stream_index = 0;
  /// False when the crossing was sampled by the tilted continuation after
  /// failed excursions were skipped; hit_time is then a lower bound on H.
  bool hit_exact = true;

  double rstar_n() const { return q_ny + y; }
};

/// One step of the Lindley recursion: (r + xi)^+.
constexpr double reflect_step(double r, double xi) {
  const double next = r + xi;
  return next > 0 ? next : 0.0;
}

/// How the path is continued past step n until the level x+y is crossed.
enum class Continuation {
  /// Keep stepping the original walk. Exact hit times; only feasible while
  /// exp(-gamma (x+y)) is not tiny.
  direct,
  /// Sample the remaining excursions under the Cramer-tilted law and accept
  /// by rejection. Exact in law for the overshoot at any level.
  tilted,
  /// tilted when gamma (x+y) >= kAutoTiltThreshold, direct otherwise.
  automatic,
};

inline constexpr double kAutoTiltThreshold = 5.0;

const char* to_string(Continuation mode);
Continuation parse_continuation(const std::string& text);

/// Exact sampler for the overshoot of the reflected walk above a level,
/// started from a state r in [0, level].
///
/// Excursions of R away from 0 are iid. Under the tilted measure
/// dQ/dP = exp(gamma S_k) the walk drifts upwards, and on the crossing event
/// dP/dQ = exp(-gamma (S_tau - r)). The current excursion (from r) is thus
/// accepted as the crossing one with probability exp(-gamma (S_tau - r)); a
/// fresh excursion conditioned to cross is accepted with probability
/// exp(-gamma O). Both steps are exact rejection samplers.
class OvershootSampler {
 public:
  OvershootSampler(const StepLaw& law, double gamma);

  struct Draw {
    double overshoot;
    /// Steps of the crossing excursion. Equals the exact time to crossing
    /// when in_current_excursion is true.
    std::int64_t steps;
    bool in_current_excursion;
  };

  /// Throws HitCapExceeded when more than step_budget tilted steps are used.
  Draw sample(double start, double level, RngStream& rng,
              std::int64_t step_budget) const;

  double gamma() const noexcept { return gamma_; }

 private:
  TiltedLaw tilted_;
  double gamma_;
};

/// Resolved simulation parameters shared by every path of a batch.
class PathSimulator {
 public:
  /// gamma is required for tilted/automatic continuation; solved from the
  /// law when not supplied.
  PathSimulator(StepLaw law, Continuation mode,
                std::optional<double> gamma = std::nullopt);

  const StepLaw& law() const noexcept { return law_; }
  double gamma() const noexcept { return gamma_; }

  /// Effective mode for a crossing level.
  Continuation mode_for(double level) const;

  /// n + ceil(50 (level + g) / |E xi|) with g = exp(gamma level) under
  /// direct continuation and 0 under tilted.
  std::int64_t default_max_steps(std::int64_t n, double level) const;

  /// Simulates one path with the Lindley recursion. Steps 1..n are drawn
  /// from stream (Lane::steps of its key) and give R_n and R*_n exactly; if
  /// x+y is not crossed by then, the path is continued per mode.
  /// Throws HitCapExceeded when the level is not crossed within max_steps.
  TripletSample run_path(std::int64_t n, double x, double y,
                         const RngStream& stream, std::int64_t max_steps) const;

  /// O_level for a walk reflected at 0 and started at R_0 = 0.
  double overshoot(double level, const RngStream& stream,
                   std::int64_t max_steps) const;

  /// R*_n = max_{k <= n} R_k.
  double running_max(std::int64_t n, const RngStream& stream) const;

 private:
  StepLaw law_;
  Continuation mode_;
  double gamma_ = 0;
  std::optional<OvershootSampler> sampler_;
};

/// Free-function form with direct continuation.
TripletSample run_path(const StepLaw& law, std::int64_t n, double x, double y,
                       const RngStream& stream, std::int64_t max_steps);

/// Deterministic replay of a given step sequence (no continuation): the
/// level must be crossed within the sequence.
TripletSample run_path_on_steps(const std::vector<double>& steps,
                                std::int64_t n, double x, double y);

struct BatchConfig {
  explicit BatchConfig(StepLaw l) : law(std::move(l)) {}

  StepLaw law;
  std::int64_t n = 2000;
  double x = 13;
  double y = 12;
  std::int64_t paths = 1;
  std::uint64_t master_seed = 0;
  /// 0 selects PathSimulator::default_max_steps.
  std::int64_t max_steps = 0;
  Continuation mode = Continuation::automatic;
  unsigned workers = 0;
  std::optional<double> gamma;
};

/// Path i uses stream (master_seed, i). Output is in path order and
/// independent of the worker count. A HitCapExceeded carries the lowest
/// failing path index.
std::vector<TripletSample> run_batch(const BatchConfig& cfg);

std::vector<double> overshoot_batch(const PathSimulator& sim, double level,
                                    std::int64_t paths, std::uint64_t master_seed,
                                    unsigned workers, std::int64_t max_steps = 0);

std::vector<double> running_max_batch(const PathSimulator& sim, std::int64_t n,
                                      std::int64_t paths, std::uint64_t master_seed,
                                      unsigned workers);

/// `path_id,n,x,y,r_n,q_ny,o_xy,hit_time`, 17 significant digits.
void write_triplets_csv(std::ostream& os, const std::vector<TripletSample>& samples);

}  // namespace segscore
