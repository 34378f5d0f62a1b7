#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "segscore/step_law.hpp"

namespace segscore {

/// Finitely supported distribution on the integers: probs[i] is the mass at
/// offset + i.
struct LatticePmf {
  std::int64_t offset = 0;
  std::vector<double> probs;

  std::int64_t min_value() const { return offset; }
  std::int64_t max_value() const {
    return offset + static_cast<std::int64_t>(probs.size()) - 1;
  }
  double at(std::int64_t value) const;
  /// P(X <= value).
  double cdf(std::int64_t value) const;
  double total_mass() const;
  double mean() const;
  /// E[exp(z max(X, 0))] for complex z; z = i theta gives the characteristic
  /// function of X^+, z = -v its Laplace transform.
  std::complex<double> transform_plus(std::complex<double> z) const;
};

/// Throws ConfigError unless probs are nonnegative and sum to 1 within tol.
void validate_pmf(const LatticePmf& pmf, double tol = 1e-12);

/// Step pmf of a lattice StepLaw; throws ExactUnavailable for other laws.
LatticePmf lattice_step_pmf(const StepLaw& law);

inline constexpr std::size_t kDefaultSupportCap = 100000;

/// Exact law of S_n by n-fold convolution.
LatticePmf law_of_Sn(const LatticePmf& step, std::int64_t n,
                     std::size_t support_cap = kDefaultSupportCap);

/// Laws of S_1, ..., S_n from one incremental convolution pass.
std::vector<LatticePmf> laws_of_Sn_upto(const LatticePmf& step, std::int64_t n,
                                        std::size_t support_cap = kDefaultSupportCap);

/// Exact law of R_n by pushing the pmf through r -> (r + xi)^+ n times.
LatticePmf law_of_Rn(const LatticePmf& step, std::int64_t n,
                     std::size_t support_cap = kDefaultSupportCap);

/// P(R_n <= w, R*_n <= y) for w in [0, w_max] and each requested y.
struct JointCdfTable {
  std::int64_t w_max = 0;
  std::vector<std::int64_t> y_levels;
  /// cdf[j][w] for y_levels[j].
  std::vector<std::vector<double>> cdf;

  double at(std::size_t y_index, std::int64_t w) const;
};

JointCdfTable joint_RnRstar(const LatticePmf& step, std::int64_t n,
                            const std::vector<std::int64_t>& y_levels,
                            std::size_t support_cap = kDefaultSupportCap);

struct OvershootLaw {
  /// Law of O_x = R_{H(x)} - x, renormalised; support starts at 1.
  LatticePmf pmf;
  /// Mass still unabsorbed when the iteration stopped (< eps).
  double residual = 0;
  double eps = 0;
  std::int64_t iterations = 0;
};

/// Absorbing-chain DP on states {0..x}; iterates until the unabsorbed mass
/// drops below eps. Throws NonConvergence after max_iterations.
OvershootLaw law_of_Ox(const LatticePmf& step, std::int64_t x, double eps,
                       std::int64_t max_iterations = 10'000'000);

/// `value,probability` rows.
void write_pmf_csv(std::ostream& os, const LatticePmf& pmf);

}  // namespace segscore
