#pragma once

#include <functional>

#include "segscore/step_law.hpp"

namespace segscore {

struct Bracket {
  double lo;
  double hi;
};

/// Cramer coefficient gamma > 0 with E[exp(gamma xi)] = 1, together with
/// the Chernoff constant rho = min_{0 <= s <= gamma} E[exp(s xi)] that bounds
/// P(S_n > 0) <= rho^n.
struct CramerSolution {
  double gamma;
  double rho;
  double s_at_min;
  double tolerance;
  Bracket bracket;
};

struct RhoResult {
  double rho;
  double s_at_min;
};

inline constexpr double kDefaultCramerTol = 1e-10;

/// Root of mgf(s) = 1 on (0, domain_end) for an MGF with mgf(0) = 1 and
/// negative slope at 0 (mean < 0). Expands a bracket by doubling, then
/// bisects. Throws NegDriftViolated when mean >= 0 and NoRoot when mgf stays
/// at or below 1 up to the domain edge.
CramerSolution solve_gamma(const std::function<double(double)>& mgf, double mean,
                           double domain_end, double tol = kDefaultCramerTol);

CramerSolution solve_gamma(const StepLaw& law, double tol = kDefaultCramerTol);

/// Golden-section minimisation of a convex MGF over [0, gamma].
RhoResult compute_rho(const std::function<double(double)>& mgf, double gamma);
RhoResult compute_rho(const StepLaw& law, double gamma);

}  // namespace segscore
