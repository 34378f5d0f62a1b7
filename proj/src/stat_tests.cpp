#include "segscore/stat_tests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "segscore/error.hpp"
#include "segscore/parallel.hpp"
#include "segscore/rng.hpp"

namespace segscore {

namespace {

void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) throw EmptySample(std::string(what) + ": empty sample");
}

std::vector<double> sorted_copy(std::span<const double> s) {
  std::vector<double> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

// Uniform integer in [0, bound).
std::uint64_t below(RngStream& rng, std::uint64_t bound) {
  const unsigned __int128 p = static_cast<unsigned __int128>(rng.next_u64()) * bound;
  return static_cast<std::uint64_t>(p >> 64);
}

nlohmann::json finite_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

double ecdf(std::span<const double> samples, double t) {
  require_nonempty(samples.size(), "ecdf");
  const auto count = std::count_if(samples.begin(), samples.end(),
                                   [t](double v) { return v <= t; });
  return static_cast<double>(count) / static_cast<double>(samples.size());
}

KsReport ks_test(std::span<const double> samples,
                 const std::function<double(double)>& cdf,
                 std::optional<double> threshold, std::string reference) {
  require_nonempty(samples.size(), "ks_test");
  const auto x = sorted_copy(samples);
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (static_cast<double>(i) + 1) / n - f, f - static_cast<double>(i) / n});
  }
  KsReport r;
  r.statistic = std::clamp(d, 0.0, 1.0);
  r.n_samples = static_cast<std::int64_t>(x.size());
  r.threshold = threshold.value_or(ks_threshold(x.size()));
  r.pass = r.statistic <= r.threshold;
  r.reference = std::move(reference);
  return r;
}

KsReport two_sample_ks(std::span<const double> a, std::span<const double> b,
                       std::optional<double> threshold) {
  require_nonempty(a.size(), "two_sample_ks");
  require_nonempty(b.size(), "two_sample_ks");
  const auto xa = sorted_copy(a);
  const auto xb = sorted_copy(b);
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < xa.size() && j < xb.size()) {
    const double t = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] == t) ++i;
    while (j < xb.size() && xb[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsReport r;
  r.statistic = d;
  r.n_samples = static_cast<std::int64_t>(xa.size() + xb.size());
  r.threshold = threshold.value_or(1.36 * std::sqrt(1 / na + 1 / nb));
  r.pass = r.statistic <= r.threshold;
  r.reference = "two_sample";
  return r;
}

double empirical_quantile(std::span<const double> samples, double rank) {
  require_nonempty(samples.size(), "empirical_quantile");
  std::vector<double> v(samples.begin(), samples.end());
  const double n = static_cast<double>(v.size());
  auto k = static_cast<std::size_t>(std::ceil(rank * n));
  k = std::clamp<std::size_t>(k, 1, v.size()) - 1;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

std::vector<GridPoint> triplet_coordinates(std::span<const TripletSample> samples) {
  std::vector<GridPoint> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back({s.r_n, s.q_ny, s.o_xy});
  return out;
}

IndependenceReport independence_test(std::span<const GridPoint> samples,
                                     const IndependenceOptions& opt) {
  require_nonempty(samples.size(), "independence_test");
  if (opt.n_boot < 1) throw ConfigError("n_boot must be >= 1");
  if (!(opt.null_quantile > 0 && opt.null_quantile < 1)) {
    throw ConfigError("null_quantile must lie in (0,1)");
  }
  const std::size_t n = samples.size();
  std::array<std::vector<double>, 3> cols;
  for (int c = 0; c < 3; ++c) {
    cols[c].reserve(n);
    for (const auto& s : samples) cols[c].push_back(s[c]);
    const auto [lo, hi] = std::minmax_element(cols[c].begin(), cols[c].end());
    if (*lo == *hi) {
      throw DegenerateCoordinate("coordinate " + std::to_string(c) + " is constant");
    }
  }

  IndependenceReport rep;
  rep.grid = opt.grid;
  if (rep.grid.empty()) {
    std::array<std::array<double, 3>, 3> q{};
    for (int c = 0; c < 3; ++c) {
      for (std::size_t r = 0; r < kGridRanks.size(); ++r) {
        q[c][r] = empirical_quantile(cols[c], kGridRanks[r]);
      }
    }
    for (double a : q[0])
      for (double b : q[1])
        for (double c : q[2]) rep.grid.push_back({a, b, c});
  }

  // Per-coordinate threshold lists and, for every sample, the index of the
  // first threshold >= value: v <= t_l  <=>  code(v) <= l.
  std::array<std::vector<double>, 3> levels;
  for (int c = 0; c < 3; ++c) {
    for (const auto& g : rep.grid) levels[c].push_back(g[c]);
    std::sort(levels[c].begin(), levels[c].end());
    levels[c].erase(std::unique(levels[c].begin(), levels[c].end()), levels[c].end());
  }
  std::array<std::size_t, 3> dims{};
  std::array<std::vector<std::uint32_t>, 3> codes;
  for (int c = 0; c < 3; ++c) {
    dims[c] = levels[c].size() + 1;
    codes[c].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      codes[c][i] = static_cast<std::uint32_t>(
          std::lower_bound(levels[c].begin(), levels[c].end(), cols[c][i]) -
          levels[c].begin());
    }
  }
  std::vector<std::array<std::size_t, 3>> grid_idx;
  for (const auto& g : rep.grid) {
    std::array<std::size_t, 3> idx{};
    for (int c = 0; c < 3; ++c) {
      idx[c] = static_cast<std::size_t>(
          std::lower_bound(levels[c].begin(), levels[c].end(), g[c]) - levels[c].begin());
    }
    grid_idx.push_back(idx);
  }

  const double dn = static_cast<double>(n);
  std::array<std::vector<double>, 3> marginal;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> counts(dims[c], 0.0);
    for (auto k : codes[c]) counts[k] += 1;
    for (std::size_t l = 1; l < dims[c]; ++l) counts[l] += counts[l - 1];
    for (auto& v : counts) v /= dn;
    marginal[c] = std::move(counts);
  }

  auto evaluate = [&](const std::vector<std::uint32_t>& c1,
                      const std::vector<std::uint32_t>& c2, std::vector<double>* joint_out,
                      std::vector<double>* prod_out) {
    std::vector<double> cum(dims[0] * dims[1] * dims[2], 0.0);
    auto at = [&](std::size_t a, std::size_t b, std::size_t c) -> double& {
      return cum[(a * dims[1] + b) * dims[2] + c];
    };
    for (std::size_t i = 0; i < n; ++i) at(codes[0][i], c1[i], c2[i]) += 1;
    for (std::size_t a = 0; a < dims[0]; ++a)
      for (std::size_t b = 0; b < dims[1]; ++b)
        for (std::size_t c = 1; c < dims[2]; ++c) at(a, b, c) += at(a, b, c - 1);
    for (std::size_t a = 0; a < dims[0]; ++a)
      for (std::size_t b = 1; b < dims[1]; ++b)
        for (std::size_t c = 0; c < dims[2]; ++c) at(a, b, c) += at(a, b - 1, c);
    for (std::size_t a = 1; a < dims[0]; ++a)
      for (std::size_t b = 0; b < dims[1]; ++b)
        for (std::size_t c = 0; c < dims[2]; ++c) at(a, b, c) += at(a - 1, b, c);
    double sup = 0;
    for (const auto& g : grid_idx) {
      const double joint = at(g[0], g[1], g[2]) / dn;
      const double prod = marginal[0][g[0]] * marginal[1][g[1]] * marginal[2][g[2]];
      sup = std::max(sup, std::abs(joint - prod));
      if (joint_out) joint_out->push_back(joint);
      if (prod_out) prod_out->push_back(prod);
    }
    return sup;
  };

  rep.sup_diff = evaluate(codes[1], codes[2], &rep.joint_cdf, &rep.product_cdf);

  std::vector<double> null_stats(static_cast<std::size_t>(opt.n_boot));
  parallel_for(null_stats.size(), opt.workers, [&](std::size_t b) {
    RngStream rng(opt.boot_seed, b, Lane::auxiliary);
    auto c1 = codes[1];
    auto c2 = codes[2];
    for (std::size_t i = n; i > 1; --i) {
      std::swap(c1[i - 1], c1[below(rng, i)]);
      std::swap(c2[i - 1], c2[below(rng, i)]);
    }
    null_stats[b] = evaluate(c1, c2, nullptr, nullptr);
  });
  std::sort(null_stats.begin(), null_stats.end());
  auto k = static_cast<std::size_t>(
      std::ceil(opt.null_quantile * static_cast<double>(null_stats.size())));
  k = std::clamp<std::size_t>(k, 1, null_stats.size()) - 1;
  rep.threshold = null_stats[k];
  rep.pass = rep.sup_diff <= rep.threshold;
  rep.n_samples = static_cast<std::int64_t>(n);
  rep.n_boot = opt.n_boot;
  return rep;
}

GumbelReport gumbel_test_normalized(std::span<const double> z,
                                    std::optional<double> threshold) {
  require_nonempty(z.size(), "gumbel_test");
  GumbelReport r;
  r.location_hat = empirical_quantile(z, 0.5) - kGumbelMedian;
  std::vector<double> shifted(z.begin(), z.end());
  for (double& v : shifted) v -= r.location_hat;
  const auto ks = ks_test(shifted, gumbel_cdf, threshold, "gumbel");
  r.statistic = ks.statistic;
  r.threshold = ks.threshold;
  r.pass = ks.pass;
  r.n_samples = ks.n_samples;
  return r;
}

GumbelReport gumbel_test(std::span<const double> rstar_samples, double gamma,
                         std::int64_t n, std::optional<double> threshold) {
  require_nonempty(rstar_samples.size(), "gumbel_test");
  if (!(gamma > 0)) throw ConfigError("gamma must be > 0");
  if (n < 1) throw ConfigError("n must be >= 1");
  std::vector<double> z(rstar_samples.begin(), rstar_samples.end());
  const double log_n = std::log(static_cast<double>(n));
  for (double& v : z) v = gamma * v - log_n;
  return gumbel_test_normalized(z, threshold);
}

nlohmann::json to_json(const KsReport& r) {
  return {{"statistic", r.statistic}, {"n_samples", r.n_samples},
          {"threshold", r.threshold}, {"pass", r.pass},
          {"reference", r.reference}};
}

nlohmann::json to_json(const IndependenceReport& r) {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& g : r.grid) {
    grid.push_back({finite_or_inf(g[0]), finite_or_inf(g[1]), finite_or_inf(g[2])});
  }
  return {{"grid", grid},           {"joint_cdf", r.joint_cdf},
          {"product_cdf", r.product_cdf}, {"sup_diff", r.sup_diff},
          {"threshold", r.threshold}, {"pass", r.pass},
          {"n_samples", r.n_samples}, {"n_boot", r.n_boot}};
}

nlohmann::json to_json(const GumbelReport& r) {
  return {{"location_hat", r.location_hat}, {"statistic", r.statistic},
          {"threshold", r.threshold},       {"pass", r.pass},
          {"n_samples", r.n_samples}};
}

}  // namespace segscore
