#include "segscore/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include "segscore/error.hpp"

namespace segscore {

namespace {

constexpr double kConservationTol = 1e-10;

void check_mass(const LatticePmf& pmf, const char* what) {
  const double mass = pmf.total_mass();
  if (std::abs(mass - 1) > kConservationTol) {
    std::ostringstream os;
    os << what << ": probability mass drifted to " << mass;
    throw NonConvergence(os.str());
  }
}

void check_support(std::size_t size, std::size_t cap) {
  if (size > cap) {
    std::ostringstream os;
    os << "lattice support of " << size << " points exceeds the cap of " << cap;
    throw SupportOverflow(os.str());
  }
}

void check_steps(std::int64_t n) {
  if (n < 1) throw ConfigError("n must be >= 1");
}

}  // namespace

double LatticePmf::at(std::int64_t value) const {
  if (value < min_value() || value > max_value()) return 0.0;
  return probs[static_cast<std::size_t>(value - offset)];
}

double LatticePmf::cdf(std::int64_t value) const {
  if (value < min_value()) return 0.0;
  const auto last = std::min(value, max_value()) - offset;
  double acc = 0;
  for (std::int64_t i = 0; i <= last; ++i) acc += probs[static_cast<std::size_t>(i)];
  return acc;
}

double LatticePmf::total_mass() const {
  return std::accumulate(probs.begin(), probs.end(), 0.0);
}

double LatticePmf::mean() const {
  double acc = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i] * static_cast<double>(offset + static_cast<std::int64_t>(i));
  }
  return acc;
}

std::complex<double> LatticePmf::transform_plus(std::complex<double> z) const {
  std::complex<double> acc = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const auto v = offset + static_cast<std::int64_t>(i);
    if (probs[i] == 0) continue;
    acc += v <= 0 ? std::complex<double>(probs[i])
                  : probs[i] * std::exp(z * static_cast<double>(v));
  }
  return acc;
}

void validate_pmf(const LatticePmf& pmf, double tol) {
  if (pmf.probs.empty()) throw ConfigError("pmf has empty support");
  for (double p : pmf.probs) {
    if (!(p >= 0) || !std::isfinite(p)) throw ConfigError("pmf has a negative mass");
  }
  if (std::abs(pmf.total_mass() - 1) > tol) throw ConfigError("pmf does not sum to 1");
}

LatticePmf lattice_step_pmf(const StepLaw& law) {
  if (const auto* tp = std::get_if<TwoPointLattice>(&law.family())) {
    return LatticePmf{-1, {1 - tp->p, 0.0, tp->p}};
  }
  throw ExactUnavailable("exact lattice computations need a lattice law, got " +
                         law.family_name());
}

namespace {

LatticePmf convolve(const LatticePmf& a, const LatticePmf& b) {
  LatticePmf out{a.offset + b.offset,
                 std::vector<double>(a.probs.size() + b.probs.size() - 1, 0.0)};
  for (std::size_t i = 0; i < a.probs.size(); ++i) {
    if (a.probs[i] == 0) continue;
    for (std::size_t j = 0; j < b.probs.size(); ++j) {
      out.probs[i + j] += a.probs[i] * b.probs[j];
    }
  }
  return out;
}

}  // namespace

LatticePmf law_of_Sn(const LatticePmf& step, std::int64_t n, std::size_t support_cap) {
  validate_pmf(step);
  check_steps(n);
  check_support((step.probs.size() - 1) * static_cast<std::size_t>(n) + 1, support_cap);
  LatticePmf cur = step;
  for (std::int64_t k = 1; k < n; ++k) cur = convolve(cur, step);
  check_mass(cur, "law_of_Sn");
  return cur;
}

std::vector<LatticePmf> laws_of_Sn_upto(const LatticePmf& step, std::int64_t n,
                                        std::size_t support_cap) {
  validate_pmf(step);
  check_steps(n);
  check_support((step.probs.size() - 1) * static_cast<std::size_t>(n) + 1, support_cap);
  std::vector<LatticePmf> out;
  out.reserve(static_cast<std::size_t>(n));
  out.push_back(step);
  for (std::int64_t k = 1; k < n; ++k) {
    out.push_back(convolve(out.back(), step));
    check_mass(out.back(), "laws_of_Sn_upto");
  }
  return out;
}

LatticePmf law_of_Rn(const LatticePmf& step, std::int64_t n, std::size_t support_cap) {
  validate_pmf(step);
  check_steps(n);
  const std::int64_t up = std::max<std::int64_t>(step.max_value(), 0);
  check_support(static_cast<std::size_t>(up * n + 1), support_cap);
  std::vector<double> cur{1.0};
  for (std::int64_t k = 0; k < n; ++k) {
    std::vector<double> next(cur.size() + static_cast<std::size_t>(up), 0.0);
    for (std::size_t r = 0; r < cur.size(); ++r) {
      if (cur[r] == 0) continue;
      for (std::size_t j = 0; j < step.probs.size(); ++j) {
        const std::int64_t to =
            std::max<std::int64_t>(static_cast<std::int64_t>(r) + step.offset +
                                       static_cast<std::int64_t>(j),
                                   0);
        next[static_cast<std::size_t>(to)] += cur[r] * step.probs[j];
      }
    }
    cur = std::move(next);
  }
  while (cur.size() > 1 && cur.back() == 0) cur.pop_back();
  LatticePmf out{0, std::move(cur)};
  check_mass(out, "law_of_Rn");
  return out;
}

double JointCdfTable::at(std::size_t y_index, std::int64_t w) const {
  if (w < 0) return 0.0;
  const auto& row = cdf.at(y_index);
  return row[static_cast<std::size_t>(std::min(w, w_max))];
}

JointCdfTable joint_RnRstar(const LatticePmf& step, std::int64_t n,
                            const std::vector<std::int64_t>& y_levels,
                            std::size_t support_cap) {
  validate_pmf(step);
  check_steps(n);
  const std::int64_t up = std::max<std::int64_t>(step.max_value(), 0);
  check_support(static_cast<std::size_t>(up * n + 1), support_cap);

  JointCdfTable table;
  table.w_max = up * n;
  table.y_levels = y_levels;
  for (const std::int64_t y : y_levels) {
    std::vector<double> row(static_cast<std::size_t>(table.w_max + 1), 0.0);
    if (y >= 0) {
      // Paths whose reflected value ever exceeds y are killed, so the
      // surviving mass at r is P(R_n = r, R*_n <= y).
      const std::int64_t top = std::min(y, table.w_max);
      std::vector<double> cur(static_cast<std::size_t>(top + 1), 0.0);
      cur[0] = 1.0;
      for (std::int64_t k = 0; k < n; ++k) {
        std::vector<double> next(cur.size(), 0.0);
        for (std::size_t r = 0; r < cur.size(); ++r) {
          if (cur[r] == 0) continue;
          for (std::size_t j = 0; j < step.probs.size(); ++j) {
            const std::int64_t to = std::max<std::int64_t>(
                static_cast<std::int64_t>(r) + step.offset + static_cast<std::int64_t>(j),
                0);
            if (to > y) continue;
            next[static_cast<std::size_t>(to)] += cur[r] * step.probs[j];
          }
        }
        cur = std::move(next);
      }
      double acc = 0;
      for (std::int64_t w = 0; w <= table.w_max; ++w) {
        if (w < static_cast<std::int64_t>(cur.size())) acc += cur[static_cast<std::size_t>(w)];
        row[static_cast<std::size_t>(w)] = acc;
      }
    }
    table.cdf.push_back(std::move(row));
  }
  return table;
}

OvershootLaw law_of_Ox(const LatticePmf& step, std::int64_t x, double eps,
                       std::int64_t max_iterations) {
  validate_pmf(step);
  if (x < 1) throw ConfigError("overshoot level x must be >= 1");
  if (!(eps > 0)) throw ConfigError("eps must be > 0");
  if (step.max_value() < 1) {
    throw NonConvergence("step law has no upward mass; level is never crossed");
  }
  const auto states = static_cast<std::size_t>(x + 1);
  std::vector<double> cur(states, 0.0);
  cur[0] = 1.0;
  std::vector<double> absorbed(static_cast<std::size_t>(step.max_value()), 0.0);
  double alive = 1.0;
  std::int64_t it = 0;
  while (alive >= eps) {
    if (it++ >= max_iterations) {
      std::ostringstream os;
      os << "overshoot DP did not absorb to eps=" << eps << " within "
         << max_iterations << " iterations (residual " << alive << ")";
      throw NonConvergence(os.str());
    }
    std::vector<double> next(states, 0.0);
    for (std::size_t r = 0; r < states; ++r) {
      if (cur[r] == 0) continue;
      for (std::size_t j = 0; j < step.probs.size(); ++j) {
        const std::int64_t to = std::max<std::int64_t>(
            static_cast<std::int64_t>(r) + step.offset + static_cast<std::int64_t>(j), 0);
        const double m = cur[r] * step.probs[j];
        if (to > x) {
          absorbed[static_cast<std::size_t>(to - x - 1)] += m;
        } else {
          next[static_cast<std::size_t>(to)] += m;
        }
      }
    }
    cur = std::move(next);
    alive = std::accumulate(cur.begin(), cur.end(), 0.0);
  }
  const double total = std::accumulate(absorbed.begin(), absorbed.end(), 0.0);
  for (double& p : absorbed) p /= total;
  return OvershootLaw{LatticePmf{1, std::move(absorbed)}, alive, eps, it};
}

void write_pmf_csv(std::ostream& os, const LatticePmf& pmf) {
  os << "value,probability\n";
  char buf[96];
  for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g\n",
                  static_cast<long long>(pmf.offset + static_cast<std::int64_t>(i)),
                  pmf.probs[i]);
    os << buf;
  }
}

}  // namespace segscore
