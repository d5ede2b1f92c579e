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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pbd/rng.hpp"
#include "pbd/stats.hpp"

using namespace pbd;

TEST_CASE("kahan summation keeps tiny terms") {
  std::vector<double> values{1e16, 1.0, -1e16, 1.0};
  CHECK(stats::kahan_sum(values) == 2.0);
}

TEST_CASE("summaries") {
  const std::vector<double> values{1, 2, 3, 4, 5};
  const auto s = stats::summarize(values);
  CHECK(s.mean == 3.0);
  CHECK(s.stderr_ == doctest::Approx(std::sqrt(2.5 / 5)).epsilon(1e-12));
  CHECK(stats::percentile({1, 2, 3, 4, 5}, 0.5) == 3.0);
  CHECK(stats::percentile({1, 2, 3, 4, 5}, 0.0) == 1.0);
  CHECK(stats::percentile({1, 2, 3, 4, 5}, 1.0) == 5.0);
}

TEST_CASE("regularized gamma functions") {
  // P(1, x) = 1 - exp(-x).
  for (const double x : {0.1, 1.0, 3.5}) {
    CHECK(stats::gamma_p(1.0, x) == doctest::Approx(1 - std::exp(-x)).epsilon(1e-12));
    CHECK(stats::gamma_q(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
  }
  // Chi-square with 2 dof: p-value of s is exp(-s/2).
  CHECK(stats::chi_square_pvalue(4.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  // Median of chi-square_1 is about 0.4549.
  CHECK(stats::chi_square_pvalue(0.454936, 1.0) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("goodness-of-fit harness accepts its own distribution") {
  rng::Stream rng(4242);
  const std::vector<double> probs{0.2, 0.3, 0.4, 0.1};
  std::vector<std::int64_t> counts(4, 0);
  const std::int64_t n = 20000;
  for (std::int64_t i = 0; i < n; ++i)
    ++counts[rng.weighted_index(probs)];
  const auto res = stats::chi_square_gof(counts, probs, n);
  CHECK(res.pvalue >= 0.01);

  // And rejects a clearly wrong one.
  const std::vector<double> wrong{0.4, 0.3, 0.2, 0.1};
  CHECK(stats::chi_square_gof(counts, wrong, n).pvalue < 0.01);
}

TEST_CASE("stream determinism and basic law checks") {
  rng::Stream a = rng::Stream::substream(9, 4);
  rng::Stream b = rng::Stream::substream(9, 4);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  rng::Stream c = rng::Stream::substream(9, 5);
  int agree = 0;
  rng::Stream a2 = rng::Stream::substream(9, 4);
  for (int i = 0; i < 64; ++i) agree += (a2.next_u64() == c.next_u64()) ? 1 : 0;
  CHECK(agree == 0);

  // Poisson moments at two means, 3 sigma.
  rng::Stream rng(31);
  for (const double mean : {0.7, 23.0, 700.0}) {
    stats::KahanAccumulator acc;
    const int reps = 40000;
    for (int i = 0; i < reps; ++i) acc.add(static_cast<double>(rng.poisson(mean)));
    const double got = acc.sum() / reps;
    CHECK(std::fabs(got - mean) <= 3 * std::sqrt(mean / reps));
  }

  // Exponential mean.
  stats::KahanAccumulator acc;
  for (int i = 0; i < 40000; ++i) acc.add(rng.exponential(2.0));
  CHECK(std::fabs(acc.sum() / 40000 - 0.5) <= 3 * 0.5 / std::sqrt(40000.0));
}
