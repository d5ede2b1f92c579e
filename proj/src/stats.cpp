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

#include "pbd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pbd::stats {

double kahan_sum(std::span<const double> values) {
  KahanAccumulator acc;
  for (double v : values) acc.add(v);
  return acc.sum();
}

MeanStderr summarize(std::span<const double> values) {
  MeanStderr out;
  out.n = static_cast<std::int64_t>(values.size());
  if (out.n == 0) return out;
  out.mean = kahan_sum(values) / static_cast<double>(out.n);
  if (out.n < 2) return out;
  KahanAccumulator sq;
  for (double v : values) {
    const double d = v - out.mean;
    sq.add(d * d);
  }
  const double var = sq.sum() / static_cast<double>(out.n - 1);
  out.stderr_ = std::sqrt(std::max(0.0, var) / static_cast<double>(out.n));
  return out;
}

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (x < 0 || a <= 0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0) return 0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (x < 0 || a <= 0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0) return 1;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_pvalue(double statistic, double dof) {
  if (dof <= 0) return 1.0;
  return gamma_q(dof / 2.0, statistic / 2.0);
}

GofResult chi_square_gof(std::span<const std::int64_t> observed,
                         std::span<const double> expected_probs,
                         std::int64_t n_total, double min_expected) {
  if (observed.size() != expected_probs.size())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  const double n = static_cast<double>(n_total);

  // Tail mass beyond the provided bins.
  double covered = kahan_sum(expected_probs);
  double tail_prob = std::max(0.0, 1.0 - covered);
  std::int64_t listed = 0;
  for (auto o : observed) listed += o;
  std::int64_t tail_obs = n_total - listed;

  std::vector<double> exp_pooled;
  std::vector<double> obs_pooled;
  double e_acc = 0, o_acc = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    e_acc += expected_probs[i] * n;
    o_acc += static_cast<double>(observed[i]);
    if (e_acc >= min_expected) {
      exp_pooled.push_back(e_acc);
      obs_pooled.push_back(o_acc);
      e_acc = 0;
      o_acc = 0;
    }
  }
  // Remaining mass plus the tail bin.
  e_acc += tail_prob * n;
  o_acc += static_cast<double>(tail_obs);
  if (!exp_pooled.empty() && e_acc < min_expected) {
    exp_pooled.back() += e_acc;
    obs_pooled.back() += o_acc;
  } else if (e_acc > 0) {
    exp_pooled.push_back(e_acc);
    obs_pooled.push_back(o_acc);
  }

  GofResult res;
  res.bins_used = static_cast<int>(exp_pooled.size());
  if (res.bins_used < 2) {
    res.pvalue = 1.0;
    return res;
  }
  double stat = 0;
  for (std::size_t i = 0; i < exp_pooled.size(); ++i) {
    const double d = obs_pooled[i] - exp_pooled[i];
    stat += d * d / exp_pooled[i];
  }
  res.statistic = stat;
  res.dof = static_cast<double>(res.bins_used - 1);
  res.pvalue = chi_square_pvalue(stat, res.dof);
  return res;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile: empty input");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace pbd::stats
