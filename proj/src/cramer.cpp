#include "segscore/cramer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "segscore/error.hpp"

namespace segscore {

namespace {

// Keeps the upper bracket clear of an MGF pole.
constexpr double kPoleMargin = 1e-9;

}  // namespace

CramerSolution solve_gamma(const std::function<double(double)>& mgf, double mean,
                           double domain_end, double tol) {
  if (!(mean < 0)) {
    std::ostringstream os;
    os << "Cramer root requires a negative mean, got " << mean;
    throw NegDriftViolated(os.str());
  }
  if (!(tol > 0)) throw ConfigError("Cramer tolerance must be > 0");

  const bool capped = std::isfinite(domain_end);
  const double cap = capped ? domain_end * (1 - kPoleMargin)
                            : std::numeric_limits<double>::infinity();

  // Find some lo > 0 with mgf(lo) < 1; exists because mgf'(0) = mean < 0.
  double lo = capped ? std::min(1.0, 0.5 * domain_end) : 1.0;
  while (!(mgf(lo) < 1)) {
    lo *= 0.5;
    if (lo < 1e-300) throw NoRoot("MGF does not dip below 1 near the origin");
  }
  double hi = lo;
  for (double probe = lo;;) {
    double next = 2 * probe;
    if (next >= cap) next = cap;
    const double m = mgf(next);
    if (m > 1) {
      hi = next;
      break;
    }
    if (m < 1) lo = next;
    if (next == cap || !std::isfinite(next)) {
      throw NoRoot("MGF stays at or below 1 on its whole domain; "
                   "Cramer's condition fails");
    }
    probe = next;
  }
  const Bracket bracket{lo, hi};

  // Bisection to floating-point resolution: the root is unique because the
  // MGF is convex with mgf(0) = 1 and a negative slope at 0.
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mgf(mid) > 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double gamma = std::abs(mgf(lo) - 1) <= std::abs(mgf(hi) - 1) ? lo : hi;
  if (!(std::abs(mgf(gamma) - 1) <= tol)) {
    std::ostringstream os;
    os << "Cramer bisection stalled at gamma=" << gamma
       << " with |mgf-1|=" << std::abs(mgf(gamma) - 1);
    throw NoRoot(os.str());
  }

  const RhoResult rho = compute_rho(mgf, gamma);
  return CramerSolution{gamma, rho.rho, rho.s_at_min, tol, bracket};
}

CramerSolution solve_gamma(const StepLaw& law, double tol) {
  return solve_gamma([&law](double s) { return law.mgf(s); }, law.mean(),
                     law.mgf_domain_end(), tol);
}

RhoResult compute_rho(const std::function<double(double)>& mgf, double gamma) {
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double a = 0, b = gamma;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = mgf(c), fd = mgf(d);
  while (b - a > 1e-12 * std::max(1.0, gamma)) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = mgf(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = mgf(d);
    }
  }
  const double s = 0.5 * (a + b);
  return RhoResult{mgf(s), s};
}

RhoResult compute_rho(const StepLaw& law, double gamma) {
  return compute_rho([&law](double s) { return law.mgf(s); }, gamma);
}

}  // namespace segscore
