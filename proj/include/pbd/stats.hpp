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

#ifndef PBD_STATS_HPP_
#define PBD_STATS_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace pbd::stats {

// Compensated (Kahan) summation.
double kahan_sum(std::span<const double> values);

// Neumaier's variant: the correction term also survives cancellation of the
// running sum itself.
class KahanAccumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  double sum() const { return sum_ + carry_; }

 private:
  double sum_ = 0;
  double carry_ = 0;
};

struct MeanStderr {
  double mean = 0;
  double stderr_ = 0;
  std::int64_t n = 0;
};

MeanStderr summarize(std::span<const double> values);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper-tail p-value of a chi-square statistic with the given degrees of
// freedom.
double chi_square_pvalue(double statistic, double dof);

struct GofResult {
  double statistic = 0;
  double dof = 0;
  double pvalue = 1;
  int bins_used = 0;
};

// Pearson chi-square goodness-of-fit test.  Adjacent bins are pooled until
// every expected count reaches min_expected; any probability mass beyond the
// last bin is folded into a final tail bin.
GofResult chi_square_gof(std::span<const std::int64_t> observed,
                         std::span<const double> expected_probs,
                         std::int64_t n_total, double min_expected = 5.0);

double percentile(std::vector<double> values, double q);

}  // namespace pbd::stats

#endif  // PBD_STATS_HPP_
