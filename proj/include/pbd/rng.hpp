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

#ifndef PBD_RNG_HPP_
#define PBD_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace pbd::rng {

// Finalizer from the splitmix64 generator; full-avalanche 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// A deterministic random stream.  Sub-streams derived from a (master seed,
// index) pair are independent for Monte Carlo purposes, so replicated
// experiments can be filled in any order (or in parallel) and still be
// reproducible.  All variate transformations live here rather than in
// <random> distributions, whose output is implementation-defined.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : gen_(mix64(seed)) {}

  static Stream substream(std::uint64_t master, std::uint64_t index) {
    return Stream(mix64(master ^ mix64(index + 0x51ed2701ULL)));
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double exponential(double rate) {
    if (!(rate > 0)) throw std::invalid_argument("exponential: rate must be > 0");
    return -std::log1p(-uniform()) / rate;
  }

  // Unbiased integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n == 0");
    const std::uint64_t bound = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= bound);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Exact Poisson draw.  Inversion by multiplication for moderate means,
  // recursive halving above the exp() underflow range.
  long poisson(double mean) {
    if (mean < 0) throw std::invalid_argument("poisson: mean must be >= 0");
    if (mean == 0) return 0;
    if (mean > 500.0) return poisson(mean / 2) + poisson(mean / 2);
    const double limit = std::exp(-mean);
    long k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

  // Index draw from unnormalized weights.
  std::size_t weighted_index(std::span<const double> weights) {
    double total = 0;
    for (double w : weights) total += w;
    if (!(total > 0)) throw std::invalid_argument("weighted_index: total weight must be > 0");
    double u = uniform() * total;
    double acc = 0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace pbd::rng

#endif  // PBD_RNG_HPP_
