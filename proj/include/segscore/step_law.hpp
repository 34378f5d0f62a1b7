#pragma once

#include <limits>
#include <string>
#include <variant>

#include "segscore/rng.hpp"

namespace segscore {

/// N(mu, sigma^2).
struct GaussianDrift {
  double mu;
  double sigma;
};

/// E - c with E ~ Exp(lambda).
struct ExpMinusDrift {
  double lambda;
  double c;
};

/// Laplace(mu, b): density exp(-|x - mu| / b) / (2b).
struct LaplaceDrift {
  double mu;
  double b;
};

/// +1 with probability p, -1 otherwise.
struct TwoPointLattice {
  double p;
};

using StepFamily =
    std::variant<GaussianDrift, ExpMinusDrift, LaplaceDrift, TwoPointLattice>;

class TiltedLaw;

/// Distribution of one step xi of a negative-drift random walk.
///
/// Construction validates the family parameters and requires E[xi] < 0,
/// so every StepLaw satisfies Cramer's condition and can be sampled without
/// further checks. Immutable and safe to share across threads.
class StepLaw {
 public:
  explicit StepLaw(StepFamily family);

  const StepFamily& family() const noexcept { return family_; }
  std::string family_name() const;

  double sample(RngStream& stream) const;
  double mean() const;

  /// E[exp(s xi)] for s >= 0; +infinity at or beyond mgf_domain_end().
  double mgf(double s) const;

  /// Supremum s_hi of the open interval [0, s_hi) on which mgf is finite.
  double mgf_domain_end() const;

  bool lattice() const noexcept {
    return std::holds_alternative<TwoPointLattice>(family_);
  }

  /// Exponentially tilted law dQ/dP = exp(gamma xi) / mgf(gamma).
  TiltedLaw tilted(double gamma) const;

 private:
  StepFamily family_;
};

/// Step law under an exponential change of measure. The tilted law of a
/// Cramer root has positive drift; it is a sampling device only and is not
/// itself a StepLaw.
class TiltedLaw {
 public:
  double sample(RngStream& stream) const;
  double mean() const { return mean_; }

 private:
  friend class StepLaw;

  enum class Kind { gaussian, shifted_exponential, asymmetric_laplace, two_point };
  Kind kind_{};
  // gaussian: (location, scale); shifted_exponential: (rate, shift);
  // asymmetric_laplace: (location, right rate, left rate, P(right));
  // two_point: P(+1).
  double a_ = 0, b_ = 0, c_ = 0, d_ = 0;
  double mean_ = 0;
};

}  // namespace segscore
