// Copyright 2026 The pbdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pbd/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pbd/stats.hpp"

namespace pbd::chain {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Detailed-balance ratio w_{k+1}/w_k as a function of a real-valued state.
double balance_ratio(const BirthDeathParams& p, double k) {
  return (p.a + p.b * k) / ((k + 1.0) * (1.0 + p.beta * k));
}

// sup over x in [from, inf) of the detailed-balance ratio.  The derivative
// numerator is -b*beta*x^2 - 2*a*beta*x + (b - a*(1+beta)), so the ratio is
// monotone when b*beta = 0 and otherwise unimodal with mode at the positive
// root; the supremum is attained at `from`, at the mode, or in the limit.
double tail_ratio_sup(const BirthDeathParams& p, double from) {
  double sup = balance_ratio(p, from);
  if (p.beta == 0.0) {
    sup = std::max(sup, p.b);  // ratio tends to b monotonically
    return sup;
  }
  if (p.b > 0.0) {
    const double A = p.b * p.beta;
    const double B = 2.0 * p.a * p.beta;
    const double C = p.b - p.a * (1.0 + p.beta);
    const double disc = B * B + 4.0 * A * C;
    if (disc > 0) {
      const double mode = (-B + std::sqrt(disc)) / (2.0 * A);
      if (mode > from) sup = std::max(sup, balance_ratio(p, mode));
    }
  }
  return sup;  // limit is 0 when beta > 0
}

}  // namespace

BirthDeathParams::BirthDeathParams(double a_in, double b_in, double beta_in)
    : a(a_in), b(b_in), beta(beta_in) {
  if (!(a > 0) || !std::isfinite(a))
    throw std::invalid_argument("BirthDeathParams: a must be > 0");
  if (!(b >= 0) || !(b < 1))
    throw std::invalid_argument("BirthDeathParams: b must lie in [0, 1)");
  if (!(beta >= 0) || !std::isfinite(beta))
    throw std::invalid_argument("BirthDeathParams: beta must be >= 0");
}

std::pair<double, double> rates(const BirthDeathParams& params, std::int64_t k) {
  if (k < 0) throw std::invalid_argument("rates: k must be >= 0");
  const double kd = static_cast<double>(k);
  return {params.birth_rate(kd), params.death_rate(kd)};
}

double CountDistribution::mean() const {
  stats::KahanAccumulator acc;
  for (std::size_t k = 0; k < probs.size(); ++k)
    acc.add(static_cast<double>(k) * probs[k]);
  return acc.sum();
}

double CountDistribution::variance() const {
  const double m = mean();
  stats::KahanAccumulator acc;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double d = static_cast<double>(k) - m;
    acc.add(d * d * probs[k]);
  }
  return acc.sum();
}

double CountDistribution::cdf(int k) const {
  stats::KahanAccumulator acc;
  const int top = std::min(k, max_count());
  for (int i = 0; i <= top; ++i) acc.add(probs[static_cast<std::size_t>(i)]);
  return acc.sum();
}

double CountDistribution::upper_tail(int k) const {
  stats::KahanAccumulator acc;
  for (int i = std::max(k, 0); i <= max_count(); ++i)
    acc.add(probs[static_cast<std::size_t>(i)]);
  acc.add(tail_bound);
  return acc.sum();
}

CountDistribution stationary(const BirthDeathParams& params, double tol, int hard_cap) {
  if (!(tol > 0) || !(tol < 1)) throw std::invalid_argument("stationary: tol must be in (0, 1)");

  std::vector<double> w{1.0};
  stats::KahanAccumulator total;
  total.add(1.0);

  for (int k = 0;; ++k) {
    if (k >= hard_cap)
      throw std::runtime_error("stationary: support exceeded hard cap (" +
                               std::to_string(hard_cap) + "); parameters look pathological");
    const double r = balance_ratio(params, static_cast<double>(k));
    const double w_next = w.back() * r;
    const double rho = tail_ratio_sup(params, static_cast<double>(k + 1));
    if (rho < 1.0) {
      const double tail = w_next / (1.0 - rho);
      if (tail < tol * total.sum()) {
        CountDistribution out;
        const double mass = total.sum();
        out.probs.resize(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) out.probs[i] = w[i] / mass;
        out.tail_bound = tail / mass;
        return out;
      }
    }
    w.push_back(w_next);
    total.add(w_next);
    if (total.sum() > 1e250) {
      // Rescale to avoid overflow; relative structure is all that matters.
      const double s = total.sum();
      stats::KahanAccumulator re;
      for (double& v : w) {
        v /= s;
        re.add(v);
      }
      total = re;
    }
  }
}

CountDistribution point_mass(int k) {
  if (k < 0) throw std::invalid_argument("point_mass: k must be >= 0");
  CountDistribution out;
  out.probs.assign(static_cast<std::size_t>(k) + 1, 0.0);
  out.probs.back() = 1.0;
  return out;
}

double tv_distance(const CountDistribution& p, const CountDistribution& q) {
  const std::size_t top = std::max(p.probs.size(), q.probs.size());
  stats::KahanAccumulator acc;
  for (std::size_t k = 0; k < top; ++k) {
    const double pk = k < p.probs.size() ? p.probs[k] : 0.0;
    const double qk = k < q.probs.size() ? q.probs[k] : 0.0;
    acc.add(std::fabs(pk - qk));
  }
  const double val = 0.5 * acc.sum() + 0.5 * (p.tail_bound + q.tail_bound);
  return std::min(1.0, val);
}

namespace {
void check_in_support(const CountDistribution& dist, int k, const char* who) {
  if (k < 0 || k > dist.max_count() || dist.probs[static_cast<std::size_t>(k)] < 1e-300)
    throw std::domain_error(std::string(who) + ": state " + std::to_string(k) +
                            " is outside the distribution support");
}
}  // namespace

double mean_hitting_time_up(const BirthDeathParams& params,
                            const CountDistribution& dist, int k) {
  check_in_support(dist, k, "mean_hitting_time_up");
  return dist.cdf(k) / (params.birth_rate(k) * dist.probs[static_cast<std::size_t>(k)]);
}

double mean_hitting_time_down(const BirthDeathParams& params,
                              const CountDistribution& dist, int k) {
  if (k < 1) throw std::invalid_argument("mean_hitting_time_down: k must be >= 1");
  check_in_support(dist, k, "mean_hitting_time_down");
  return dist.upper_tail(k) /
         (params.death_rate(k) * dist.probs[static_cast<std::size_t>(k)]);
}

double mean_deaths_before_up(const BirthDeathParams& params, int m) {
  if (m < 0) throw std::invalid_argument("mean_deaths_before_up: m must be >= 0");
  double e = 0.0;  // value at 0
  for (int j = 1; j <= m; ++j) {
    const double jd = static_cast<double>(j);
    const double birth = params.birth_rate(jd);
    const double death = params.death_rate(jd);
    e = jd * death * (1.0 + e) / (jd * birth + death * (1.0 + e));
  }
  return e;
}

namespace {
double deaths_down_from_seed(const BirthDeathParams& params, int m, int horizon,
                             double seed) {
  double e = seed;
  for (int j = horizon - 1; j >= m; --j) {
    const double jd = static_cast<double>(j);
    const double birth = params.birth_rate(jd);
    const double death = params.death_rate(jd);
    e = 1.0 + (jd - 1.0) * birth * e / (birth * e + (jd + 1.0) * death);
  }
  return e;
}
}  // namespace

Bracket mean_deaths_before_down(const BirthDeathParams& params, int m, int horizon) {
  if (m < 1) throw std::invalid_argument("mean_deaths_before_down: m must be >= 1");
  if (horizon <= m)
    throw std::invalid_argument("mean_deaths_before_down: horizon must exceed m");
  // The recursion value at `horizon` lies in [1, horizon]; it is monotone in
  // the seed, so the two extreme seeds bracket the true value at m.
  Bracket b;
  b.low = deaths_down_from_seed(params, m, horizon, 1.0);
  b.high = deaths_down_from_seed(params, m, horizon, static_cast<double>(horizon));
  if (b.low > b.high) std::swap(b.low, b.high);
  return b;
}

Bracket mean_deaths_before_down_auto(const BirthDeathParams& params, int m,
                                     double tol, int horizon_cap) {
  int horizon = std::max(2 * m + 8, 16);
  for (;;) {
    const Bracket b = mean_deaths_before_down(params, m, horizon);
    if (b.width() <= tol) return b;
    if (horizon >= horizon_cap)
      throw std::runtime_error(
          "mean_deaths_before_down_auto: bracket width " + std::to_string(b.width()) +
          " above tolerance at the horizon cap");
    horizon *= 2;
  }
}

double first_difference_bound(const BirthDeathParams& params, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("first_difference_bound: n must be >= 0");
  const double np1 = static_cast<double>(n) + 1.0;
  double bound = std::min(1.0, 0.5 / np1 + 1.0 / params.a);
  const double floor_rate = std::min(params.a, params.b);
  if (floor_rate > 0) bound = std::min(bound, 1.0 / (floor_rate * np1));
  return bound;
}

double second_difference_bound(const BirthDeathParams& params, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("second_difference_bound: n must be >= 0");
  return 2.0 / (static_cast<double>(n) + 1.0) + 5.0 / params.a;
}

std::vector<DeathCountBoundViolation> death_count_bound_violations(
    const BirthDeathParams& params, int m_max) {
  std::vector<DeathCountBoundViolation> out;
  for (int m = 1; m <= m_max; ++m) {
    const double md = static_cast<double>(m);
    const double birth = params.birth_rate(md);
    const double death = params.death_rate(md);
    const double slack = 1e-9;
    if (birth > death) {
      const double lhs = 1.0 + mean_deaths_before_up(params, m);
      const double rhs = birth / (birth - death);
      if (lhs > rhs + slack) out.push_back({m, '+', lhs, rhs});
    } else if (death > birth) {
      const Bracket b = mean_deaths_before_down_auto(params, m);
      const double rhs = death / (death - birth);
      if (b.low > rhs + slack) out.push_back({m, '-', b.low, rhs});
    }
    // birth == death: neither strict-inequality branch applies.
  }
  return out;
}

}  // namespace pbd::chain
