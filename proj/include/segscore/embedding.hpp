#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "segscore/rng.hpp"
#include "segscore/spitzer.hpp"
#include "segscore/walk.hpp"

namespace segscore {

/// Poisson(mean) by inversion for mean <= 10, PTRS transformed rejection
/// (Hormann 1993) above.
std::int64_t sample_poisson(double mean, RngStream& rng);
const char* poisson_method(double mean);

/// Compound-Poisson embedding X(t) = S_{N(t)} with a unit-rate clock N:
/// Y(t) = R_{N(t)}, Y*(t) = R*_{N(t)} and the overshoot Z(x) of the
/// reflected process, which coincides with the walk's O_x.
struct EmbeddedSample {
  double t = 0;
  double x = 0;
  std::int64_t n_of_t = 0;
  double y_t = 0;
  double ystar_t = 0;
  double z_x = 0;
  std::int64_t tau_hit_index = 0;
  std::uint64_t stream_index = 0;
  bool hit_exact = true;
};

/// The clock N(t) is drawn from Lane::auxiliary; the steps from Lane::steps
/// of the same key, so under direct continuation z_x equals the o_xy of
/// PathSimulator::run_path on the same stream with x + y = x.
EmbeddedSample embed_path(const PathSimulator& sim, double t, double x,
                          const RngStream& stream, std::int64_t max_steps);

std::vector<EmbeddedSample> embed_batch(const PathSimulator& sim, double t, double x,
                                        std::int64_t paths, std::uint64_t master_seed,
                                        unsigned workers, std::int64_t max_steps = 0);

/// `path_id,t,x,n_of_t,y_t,ystar_t,z_x,tau_hit_index`.
void write_embedded_csv(std::ostream& os, const std::vector<EmbeddedSample>& samples);

struct ZinfPoint {
  double v = 0;
  double empirical = 0;
  double empirical_stderr = 0;
  double series = 0;
  double series_stderr = 0;
  double tail_bound = 0;
  double gap = 0;
  /// 3 sqrt(empirical_stderr^2 + series_stderr^2) + tail_bound.
  double budget = 0;
  bool within_budget = false;
};

struct ZinfReport {
  std::vector<ZinfPoint> points;
  double max_gap = 0;
  double threshold = 0;
  bool pass = false;
  std::int64_t paths = 0;
  double level_x = 0;
};

struct ZinfConfig {
  std::vector<double> v_grid{0.5, 1.0, 2.0};
  std::int64_t paths = 100000;
  double level_x = 25;
  /// Embedding horizon used for the samples; Z(x) does not depend on it.
  double t = 1.0;
  std::uint64_t master_seed = 0;
  unsigned workers = 0;
  SeriesConfig series;
  double threshold = 0.01;
};

/// Empirical E[exp(-v Z(x))] from embedded paths against the Laplace
/// transform of O_inf from the Spitzer-type series.
ZinfReport verify_zinf(const PathSimulator& sim, const ZinfConfig& cfg);

nlohmann::json to_json(const ZinfReport& r);

}  // namespace segscore
