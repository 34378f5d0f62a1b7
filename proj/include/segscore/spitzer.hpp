#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segscore/cramer.hpp"
#include "segscore/step_law.hpp"

namespace segscore {

enum class EstimatorKind { monte_carlo, exact_lattice };

const char* to_string(EstimatorKind kind);

/// How the terms E[exp(z S_n^+)] are obtained.
struct Estimator {
  EstimatorKind kind = EstimatorKind::monte_carlo;
  /// Monte Carlo only: number of simulated walks of length N. Every term
  /// S_1..S_N of one walk feeds the same sample, for all requested z.
  std::int64_t samples_per_term = 100000;
  std::uint64_t master_seed = 0;
  unsigned workers = 0;
};

struct TermEstimate {
  std::complex<double> value;
  double std_error = 0;
};

/// E[exp(i theta S_n^+)] = P(S_n <= 0) + E[exp(i theta S_n) 1{S_n > 0}].
/// Throws ExactUnavailable for exact_lattice on a non-lattice law.
TermEstimate moment_plus_cf(const StepLaw& law, std::int64_t n, double theta,
                            const Estimator& estimator);

/// 2 rho^{N+1} / ((N+1)(1-rho)): bound on the series tail past N, uniform in
/// the transform argument, from |1 - E[e^{z S_n^+}]| <= 2 P(S_n > 0) <= 2 rho^n.
double truncation_bound(double rho, std::int64_t n_terms);

/// Smallest N with truncation_bound(rho, N) <= target, capped at max_terms.
std::int64_t terms_for_tail(double rho, double target, std::int64_t max_terms);

struct SeriesConfig {
  /// Fixed truncation; when unset, chosen from target_tail.
  std::optional<std::int64_t> n_terms;
  double target_tail = 1e-6;
  std::int64_t max_terms = 500;
  Estimator estimator;
};

/// Value of a transform of O_inf or R_inf with its error bookkeeping.
struct TransformEval {
  double arg = 0;
  std::complex<double> value;
  std::int64_t n_terms = 0;
  double tail_bound = 0;
  double mc_stderr = 0;
  EstimatorKind estimator = EstimatorKind::monte_carlo;
  std::int64_t samples_per_term = 0;
};

/// Term estimates E[exp(z_k S_n^+)], n = 1..N, for a set of exponents z_k,
/// computed from one common pool of walks.
class SpitzerTerms {
 public:
  std::int64_t n_terms() const noexcept { return n_terms_; }
  std::size_t size() const noexcept { return exponents_.size(); }
  std::complex<double> exponent(std::size_t k) const { return exponents_.at(k); }

  /// E[exp(z_k S_n^+)] for 1 <= n <= N.
  TermEstimate term(std::size_t k, std::int64_t n) const;

  /// sum_{n<=N} (1/n) (E[exp(z_k S_n^+)] - 1): the log of the R_inf transform.
  std::complex<double> log_series(std::size_t k) const { return log_series_.at(k); }
  /// Monte Carlo standard error of log_series(k) (per-walk variance, so the
  /// correlation between terms of the same walk is accounted for).
  double log_series_stderr(std::size_t k) const { return log_stderr_.at(k); }

  EstimatorKind estimator() const noexcept { return kind_; }
  std::int64_t samples() const noexcept { return samples_; }

  static SpitzerTerms estimate(const StepLaw& law,
                               std::span<const std::complex<double>> exponents,
                               std::int64_t n_terms, const Estimator& estimator);

 private:
  std::vector<std::complex<double>> exponents_;
  std::int64_t n_terms_ = 0;
  EstimatorKind kind_ = EstimatorKind::monte_carlo;
  std::int64_t samples_ = 0;
  // [k * N + (n-1)]
  std::vector<std::complex<double>> terms_;
  std::vector<double> term_stderr_;
  std::vector<std::complex<double>> log_series_;
  std::vector<double> log_stderr_;
};

/// Series evaluator bound to one law: resolves gamma, rho and N once.
class SpitzerSeries {
 public:
  SpitzerSeries(StepLaw law, SeriesConfig cfg,
                std::optional<CramerSolution> cramer = std::nullopt);

  double gamma() const noexcept { return cramer_.gamma; }
  double rho() const noexcept { return cramer_.rho; }
  std::int64_t n_terms() const noexcept { return n_terms_; }
  double tail_bound() const noexcept { return tail_bound_; }
  const SeriesConfig& config() const noexcept { return cfg_; }

  SpitzerTerms cf_terms(std::span<const double> thetas) const;
  SpitzerTerms laplace_terms(std::span<const double> vs) const;

  /// gamma/(gamma - i theta) exp{sum (1/n)(1 - E[e^{i theta S_n^+}])}.
  std::vector<TransformEval> cf_O(std::span<const double> thetas) const;
  /// exp{sum (1/n)(E[e^{i theta S_n^+}] - 1)}.
  std::vector<TransformEval> cf_R(std::span<const double> thetas) const;
  /// gamma/(gamma + v) exp{sum (1/n)(1 - E[e^{-v S_n^+}])}.
  std::vector<TransformEval> laplace_O(std::span<const double> vs) const;

  /// Transforms from precomputed terms, so that cf_O and cf_R can share them.
  TransformEval o_from_terms(const SpitzerTerms& terms, std::size_t k,
                             double arg) const;
  TransformEval r_from_terms(const SpitzerTerms& terms, std::size_t k,
                             double arg) const;

 private:
  StepLaw law_;
  SeriesConfig cfg_;
  CramerSolution cramer_;
  std::int64_t n_terms_ = 0;
  double tail_bound_ = 0;
};

TransformEval cf_O_infinity(const StepLaw& law, double gamma, double theta,
                            const SeriesConfig& cfg);
TransformEval cf_R_infinity(const StepLaw& law, double theta, const SeriesConfig& cfg);
TransformEval laplace_O_infinity(const StepLaw& law, double gamma, double v,
                                 const SeriesConfig& cfg);

/// `arg,re,im,n_terms,tail_bound,mc_stderr,estimator`.
void write_transform_csv(std::ostream& os, const std::vector<TransformEval>& evals);

}  // namespace segscore
