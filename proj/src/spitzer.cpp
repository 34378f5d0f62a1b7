#include "segscore/spitzer.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "segscore/error.hpp"
#include "segscore/lattice.hpp"
#include "segscore/parallel.hpp"
#include "segscore/rng.hpp"

namespace segscore {

namespace {

using cplx = std::complex<double>;

// Walks per reduction block. Fixed so that sums do not depend on the number
// of workers.
constexpr std::int64_t kBlock = 2048;

}  // namespace

const char* to_string(EstimatorKind kind) {
  return kind == EstimatorKind::exact_lattice ? "exact_lattice" : "monte_carlo";
}

double truncation_bound(double rho, std::int64_t n_terms) {
  if (!(rho > 0 && rho < 1)) throw ConfigError("rho must lie in (0,1)");
  if (n_terms < 1) throw ConfigError("N must be >= 1");
  const double n1 = static_cast<double>(n_terms + 1);
  return 2 * std::pow(rho, n1) / (n1 * (1 - rho));
}

std::int64_t terms_for_tail(double rho, double target, std::int64_t max_terms) {
  for (std::int64_t n = 1; n < max_terms; ++n) {
    if (truncation_bound(rho, n) <= target) return n;
  }
  return max_terms;
}

TermEstimate SpitzerTerms::term(std::size_t k, std::int64_t n) const {
  if (n < 1 || n > n_terms_) throw ConfigError("term index out of range");
  const auto idx = k * static_cast<std::size_t>(n_terms_) + static_cast<std::size_t>(n - 1);
  return TermEstimate{terms_.at(idx), term_stderr_.at(idx)};
}

SpitzerTerms SpitzerTerms::estimate(const StepLaw& law,
                                    std::span<const cplx> exponents,
                                    std::int64_t n_terms, const Estimator& est) {
  if (n_terms < 1) throw ConfigError("N must be >= 1");
  SpitzerTerms out;
  out.exponents_.assign(exponents.begin(), exponents.end());
  out.n_terms_ = n_terms;
  out.kind_ = est.kind;
  const std::size_t nz = exponents.size();
  const auto N = static_cast<std::size_t>(n_terms);
  out.terms_.assign(nz * N, cplx(1.0));
  out.term_stderr_.assign(nz * N, 0.0);
  out.log_series_.assign(nz, cplx(0.0));
  out.log_stderr_.assign(nz, 0.0);

  if (est.kind == EstimatorKind::exact_lattice) {
    const LatticePmf step = lattice_step_pmf(law);
    const auto laws = laws_of_Sn_upto(step, n_terms);
    for (std::size_t k = 0; k < nz; ++k) {
      cplx log_sum = 0;
      for (std::size_t n = 0; n < N; ++n) {
        // E[e^{z S^+}] - 1 = sum_{v>0} p_v (e^{z v} - 1); exact zero at z = 0.
        const LatticePmf& pmf = laws[n];
        cplx minus_one = 0;
        for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
          const auto v = pmf.offset + static_cast<std::int64_t>(i);
          if (v <= 0 || pmf.probs[i] == 0) continue;
          minus_one += pmf.probs[i] * (std::exp(exponents[k] * static_cast<double>(v)) - 1.0);
        }
        out.terms_[k * N + n] = 1.0 + minus_one;
        log_sum += minus_one / static_cast<double>(n + 1);
      }
      out.log_series_[k] = log_sum;
    }
    return out;
  }

  if (est.samples_per_term < 2) throw ConfigError("samples_per_term must be >= 2");
  out.samples_ = est.samples_per_term;
  const std::int64_t M = est.samples_per_term;
  const auto blocks = static_cast<std::size_t>((M + kBlock - 1) / kBlock);

  struct Partial {
    std::vector<cplx> term_sum;   // sum of (e^{z S_n^+} - 1)
    std::vector<double> term_sq;  // sum of |e^{z S_n^+} - 1|^2
    std::vector<cplx> g_sum;      // sum over walks of the per-walk log series
    std::vector<double> g_sq;
  };
  std::vector<Partial> partials(blocks);

  parallel_for(blocks, est.workers, [&](std::size_t b) {
    Partial p{std::vector<cplx>(nz * N, 0.0), std::vector<double>(nz * N, 0.0),
              std::vector<cplx>(nz, 0.0), std::vector<double>(nz, 0.0)};
    std::vector<cplx> g(nz);
    const std::int64_t begin = static_cast<std::int64_t>(b) * kBlock;
    const std::int64_t end = std::min(M, begin + kBlock);
    for (std::int64_t j = begin; j < end; ++j) {
      RngStream rng(est.master_seed, static_cast<std::uint64_t>(j));
      std::fill(g.begin(), g.end(), cplx(0.0));
      double s = 0;
      for (std::size_t n = 0; n < N; ++n) {
        s += law.sample(rng);
        if (s <= 0) continue;
        const double inv_n = 1.0 / static_cast<double>(n + 1);
        for (std::size_t k = 0; k < nz; ++k) {
          const cplx e = std::exp(exponents[k] * s) - 1.0;
          p.term_sum[k * N + n] += e;
          p.term_sq[k * N + n] += std::norm(e);
          g[k] += e * inv_n;
        }
      }
      for (std::size_t k = 0; k < nz; ++k) {
        p.g_sum[k] += g[k];
        p.g_sq[k] += std::norm(g[k]);
      }
    }
    partials[b] = std::move(p);
  });

  std::vector<cplx> term_sum(nz * N, 0.0), g_sum(nz, 0.0);
  std::vector<double> term_sq(nz * N, 0.0), g_sq(nz, 0.0);
  for (const auto& p : partials) {
    for (std::size_t i = 0; i < nz * N; ++i) {
      term_sum[i] += p.term_sum[i];
      term_sq[i] += p.term_sq[i];
    }
    for (std::size_t k = 0; k < nz; ++k) {
      g_sum[k] += p.g_sum[k];
      g_sq[k] += p.g_sq[k];
    }
  }
  const double m = static_cast<double>(M);
  auto stderr_of = [m](cplx sum, double sq) {
    const cplx mean = sum / m;
    const double var = std::max(0.0, (sq / m - std::norm(mean)) * m / (m - 1));
    return std::sqrt(var / m);
  };
  for (std::size_t i = 0; i < nz * N; ++i) {
    out.terms_[i] = 1.0 + term_sum[i] / m;
    out.term_stderr_[i] = stderr_of(term_sum[i], term_sq[i]);
  }
  for (std::size_t k = 0; k < nz; ++k) {
    out.log_series_[k] = g_sum[k] / m;
    out.log_stderr_[k] = stderr_of(g_sum[k], g_sq[k]);
  }
  return out;
}

TermEstimate moment_plus_cf(const StepLaw& law, std::int64_t n, double theta,
                            const Estimator& estimator) {
  if (n < 1) throw ConfigError("n must be >= 1");
  const cplx z(0.0, theta);
  const auto terms = SpitzerTerms::estimate(law, std::span<const cplx>(&z, 1), n, estimator);
  return terms.term(0, n);
}

SpitzerSeries::SpitzerSeries(StepLaw law, SeriesConfig cfg,
                             std::optional<CramerSolution> cramer)
    : law_(std::move(law)),
      cfg_(cfg),
      cramer_(cramer ? *cramer : solve_gamma(law_)) {
  if (cfg_.n_terms) {
    if (*cfg_.n_terms < 1) throw ConfigError("n_terms must be >= 1");
    n_terms_ = *cfg_.n_terms;
  } else {
    if (!(cfg_.target_tail > 0)) throw ConfigError("target tail must be > 0");
    n_terms_ = terms_for_tail(cramer_.rho, cfg_.target_tail, cfg_.max_terms);
  }
  tail_bound_ = truncation_bound(cramer_.rho, n_terms_);
}

SpitzerTerms SpitzerSeries::cf_terms(std::span<const double> thetas) const {
  std::vector<cplx> z;
  z.reserve(thetas.size());
  for (double t : thetas) z.emplace_back(0.0, t);
  return SpitzerTerms::estimate(law_, z, n_terms_, cfg_.estimator);
}

SpitzerTerms SpitzerSeries::laplace_terms(std::span<const double> vs) const {
  std::vector<cplx> z;
  z.reserve(vs.size());
  for (double v : vs) {
    if (!(v >= 0)) throw ConfigError("Laplace argument must be >= 0");
    z.emplace_back(-v, 0.0);
  }
  return SpitzerTerms::estimate(law_, z, n_terms_, cfg_.estimator);
}

TransformEval SpitzerSeries::o_from_terms(const SpitzerTerms& terms, std::size_t k,
                                          double arg) const {
  const double g = cramer_.gamma;
  const cplx value = g / (g - terms.exponent(k)) * std::exp(-terms.log_series(k));
  return TransformEval{arg,
                       value,
                       terms.n_terms(),
                       truncation_bound(cramer_.rho, terms.n_terms()),
                       std::abs(value) * terms.log_series_stderr(k),
                       terms.estimator(),
                       terms.samples()};
}

TransformEval SpitzerSeries::r_from_terms(const SpitzerTerms& terms, std::size_t k,
                                          double arg) const {
  const cplx value = std::exp(terms.log_series(k));
  return TransformEval{arg,
                       value,
                       terms.n_terms(),
                       truncation_bound(cramer_.rho, terms.n_terms()),
                       std::abs(value) * terms.log_series_stderr(k),
                       terms.estimator(),
                       terms.samples()};
}

std::vector<TransformEval> SpitzerSeries::cf_O(std::span<const double> thetas) const {
  const auto terms = cf_terms(thetas);
  std::vector<TransformEval> out;
  for (std::size_t k = 0; k < thetas.size(); ++k) out.push_back(o_from_terms(terms, k, thetas[k]));
  return out;
}

std::vector<TransformEval> SpitzerSeries::cf_R(std::span<const double> thetas) const {
  const auto terms = cf_terms(thetas);
  std::vector<TransformEval> out;
  for (std::size_t k = 0; k < thetas.size(); ++k) out.push_back(r_from_terms(terms, k, thetas[k]));
  return out;
}

std::vector<TransformEval> SpitzerSeries::laplace_O(std::span<const double> vs) const {
  const auto terms = laplace_terms(vs);
  std::vector<TransformEval> out;
  for (std::size_t k = 0; k < vs.size(); ++k) {
    auto e = o_from_terms(terms, k, vs[k]);
    e.value = cplx(e.value.real(), 0.0);
    out.push_back(e);
  }
  return out;
}

namespace {

CramerSolution cramer_for(const StepLaw& law, double gamma) {
  if (!(gamma > 0)) throw ConfigError("gamma must be > 0");
  const RhoResult rho = compute_rho(law, gamma);
  return CramerSolution{gamma, rho.rho, rho.s_at_min, 0.0, Bracket{gamma, gamma}};
}

}  // namespace

TransformEval cf_O_infinity(const StepLaw& law, double gamma, double theta,
                            const SeriesConfig& cfg) {
  return SpitzerSeries(law, cfg, cramer_for(law, gamma)).cf_O(std::span(&theta, 1)).front();
}

TransformEval cf_R_infinity(const StepLaw& law, double theta, const SeriesConfig& cfg) {
  return SpitzerSeries(law, cfg).cf_R(std::span(&theta, 1)).front();
}

TransformEval laplace_O_infinity(const StepLaw& law, double gamma, double v,
                                 const SeriesConfig& cfg) {
  return SpitzerSeries(law, cfg, cramer_for(law, gamma)).laplace_O(std::span(&v, 1)).front();
}

void write_transform_csv(std::ostream& os, const std::vector<TransformEval>& evals) {
  os << "arg,re,im,n_terms,tail_bound,mc_stderr,estimator\n";
  char buf[256];
  for (const auto& e : evals) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%lld,%.17g,%.17g,%s\n", e.arg,
                  e.value.real(), e.value.imag(), static_cast<long long>(e.n_terms),
                  e.tail_bound, e.mc_stderr, to_string(e.estimator));
    os << buf;
  }
}

}  // namespace segscore
