#include "segscore/step_law.hpp"

#include <cmath>
#include <sstream>

#include "segscore/error.hpp"

namespace segscore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

StepLaw::StepLaw(StepFamily family) : family_(std::move(family)) {
  std::visit(
      Overloaded{
          [](const GaussianDrift& g) {
            require(std::isfinite(g.mu), "gaussian_drift: mu must be finite");
            require(std::isfinite(g.sigma) && g.sigma > 0,
                    "gaussian_drift: sigma must be > 0");
          },
          [](const ExpMinusDrift& e) {
            require(std::isfinite(e.lambda) && e.lambda > 0,
                    "exp_minus_drift: lambda must be > 0");
            require(std::isfinite(e.c) && e.c > 0,
                    "exp_minus_drift: c must be > 0");
          },
          [](const LaplaceDrift& l) {
            require(std::isfinite(l.mu), "laplace_drift: mu must be finite");
            require(std::isfinite(l.b) && l.b > 0,
                    "laplace_drift: b must be > 0");
          },
          [](const TwoPointLattice& t) {
            require(t.p > 0 && t.p < 1, "two_point_lattice: p must be in (0,1)");
          },
      },
      family_);
  if (!(mean() < 0)) {
    std::ostringstream os;
    os << family_name() << ": mean " << mean()
       << " is not negative; the walk must drift to -infinity";
    throw NegDriftViolated(os.str());
  }
}

std::string StepLaw::family_name() const {
  return std::visit(Overloaded{
                        [](const GaussianDrift&) { return "gaussian_drift"; },
                        [](const ExpMinusDrift&) { return "exp_minus_drift"; },
                        [](const LaplaceDrift&) { return "laplace_drift"; },
                        [](const TwoPointLattice&) { return "two_point_lattice"; },
                    },
                    family_);
}

double StepLaw::sample(RngStream& rng) const {
  return std::visit(
      Overloaded{
          [&](const GaussianDrift& g) { return g.mu + g.sigma * rng.normal(); },
          [&](const ExpMinusDrift& e) { return rng.exponential() / e.lambda - e.c; },
          [&](const LaplaceDrift& l) {
            const double u = rng.uniform_open() - 0.5;
            return u < 0 ? l.mu + l.b * std::log(1 + 2 * u)
                         : l.mu - l.b * std::log(1 - 2 * u);
          },
          [&](const TwoPointLattice& t) { return rng.uniform() < t.p ? 1.0 : -1.0; },
      },
      family_);
}

double StepLaw::mean() const {
  return std::visit(Overloaded{
                        [](const GaussianDrift& g) { return g.mu; },
                        [](const ExpMinusDrift& e) { return 1 / e.lambda - e.c; },
                        [](const LaplaceDrift& l) { return l.mu; },
                        [](const TwoPointLattice& t) { return 2 * t.p - 1; },
                    },
                    family_);
}

double StepLaw::mgf_domain_end() const {
  return std::visit(Overloaded{
                        [](const GaussianDrift&) { return kInf; },
                        [](const ExpMinusDrift& e) { return e.lambda; },
                        [](const LaplaceDrift& l) { return 1 / l.b; },
                        [](const TwoPointLattice&) { return kInf; },
                    },
                    family_);
}

double StepLaw::mgf(double s) const {
  if (s == 0) return 1.0;
  if (s >= mgf_domain_end()) return kInf;
  return std::visit(
      Overloaded{
          [s](const GaussianDrift& g) {
            return std::exp(s * g.mu + 0.5 * s * s * g.sigma * g.sigma);
          },
          [s](const ExpMinusDrift& e) {
            return e.lambda * std::exp(-s * e.c) / (e.lambda - s);
          },
          [s](const LaplaceDrift& l) {
            return std::exp(s * l.mu) / (1 - l.b * l.b * s * s);
          },
          [s](const TwoPointLattice& t) {
            return t.p * std::exp(s) + (1 - t.p) * std::exp(-s);
          },
      },
      family_);
}

TiltedLaw StepLaw::tilted(double gamma) const {
  if (!(gamma > 0 && gamma < mgf_domain_end())) {
    throw ConfigError("tilting parameter outside the MGF domain");
  }
  TiltedLaw t;
  std::visit(
      Overloaded{
          [&](const GaussianDrift& g) {
            t.kind_ = TiltedLaw::Kind::gaussian;
            t.a_ = g.mu + gamma * g.sigma * g.sigma;
            t.b_ = g.sigma;
            t.mean_ = t.a_;
          },
          [&](const ExpMinusDrift& e) {
            t.kind_ = TiltedLaw::Kind::shifted_exponential;
            t.a_ = e.lambda - gamma;
            t.b_ = e.c;
            t.mean_ = 1 / t.a_ - e.c;
          },
          [&](const LaplaceDrift& l) {
            // exp(gamma x) exp(-|x-mu|/b): rate 1/b - gamma to the right of
            // mu, 1/b + gamma to the left, side weights proportional to the
            // reciprocal rates.
            t.kind_ = TiltedLaw::Kind::asymmetric_laplace;
            t.a_ = l.mu;
            t.b_ = 1 / l.b - gamma;
            t.c_ = 1 / l.b + gamma;
            t.d_ = t.c_ / (t.b_ + t.c_);
            t.mean_ = l.mu + t.d_ / t.b_ - (1 - t.d_) / t.c_;
          },
          [&](const TwoPointLattice& tp) {
            t.kind_ = TiltedLaw::Kind::two_point;
            const double up = tp.p * std::exp(gamma);
            const double down = (1 - tp.p) * std::exp(-gamma);
            t.a_ = up / (up + down);
            t.mean_ = 2 * t.a_ - 1;
          },
      },
      family_);
  return t;
}

double TiltedLaw::sample(RngStream& rng) const {
  switch (kind_) {
    case Kind::gaussian:
      return a_ + b_ * rng.normal();
    case Kind::shifted_exponential:
      return rng.exponential() / a_ - b_;
    case Kind::asymmetric_laplace:
      return rng.uniform() < d_ ? a_ + rng.exponential() / b_
                                : a_ - rng.exponential() / c_;
    case Kind::two_point:
      return rng.uniform() < a_ ? 1.0 : -1.0;
  }
  return 0.0;
}

}  // namespace segscore
