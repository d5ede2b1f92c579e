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

#ifndef PBD_PARALLEL_HPP_
#define PBD_PARALLEL_HPP_

#include <cstdint>
#include <vector>

#include "pbd/rng.hpp"
#include "pbd/stats.hpp"

namespace pbd::parallel {

// Process-wide switch between the OpenMP kernels and their serial reference
// counterparts.  Every kernel writes replicate results into a slot indexed by
// replicate id and reduces serially afterwards, so both paths produce
// bit-identical output.
bool enabled();
void set_enabled(bool on);

// Serial reference kernel: out[i] = fn(i, stream(seed, i)).
template <class T, class F>
std::vector<T> map_replicates_serial(std::uint64_t seed, std::int64_t n, F&& fn) {
  std::vector<T> out(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    rng::Stream s = rng::Stream::substream(seed, static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] = fn(i, s);
  }
  return out;
}

// OpenMP kernel; same stream-per-replicate contract as the serial reference.
template <class T, class F>
std::vector<T> map_replicates_parallel(std::uint64_t seed, std::int64_t n, F&& fn) {
  std::vector<T> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    rng::Stream s = rng::Stream::substream(seed, static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] = fn(i, s);
  }
  return out;
}

template <class T, class F>
std::vector<T> map_replicates(std::uint64_t seed, std::int64_t n, F&& fn) {
  if (enabled()) return map_replicates_parallel<T>(seed, n, fn);
  return map_replicates_serial<T>(seed, n, fn);
}

// Replicate an estimator and summarize with compensated reduction.
template <class F>
stats::MeanStderr replicate_mean(std::uint64_t seed, std::int64_t n, F&& fn) {
  const std::vector<double> vals = map_replicates<double>(seed, n, fn);
  return stats::summarize(vals);
}

}  // namespace pbd::parallel

#endif  // PBD_PARALLEL_HPP_
