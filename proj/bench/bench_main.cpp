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

// Timing comparison between the OpenMP kernels and their serial references.
// Each kernel pair produces bit-identical results; the benchmark asserts that
// while it measures.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <omp.h>

#include "pbd/carrier.hpp"
#include "pbd/distance.hpp"
#include "pbd/fitting.hpp"
#include "pbd/models.hpp"
#include "pbd/parallel.hpp"
#include "pbd/sim.hpp"

using namespace pbd;

namespace {

template <class F>
double time_of(F&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(const char* name, double serial, double parallel_time) {
  std::printf("%-34s serial %8.3fs   openmp %8.3fs   speedup %.2fx\n", name, serial,
              parallel_time, serial / parallel_time);
}

}  // namespace

int main(int argc, char** argv) {
  const double scale = argc > 1 ? std::atof(argv[1]) : 1.0;
  std::printf("threads available: %d\n", omp_get_max_threads());

  // Replicated Monte Carlo: coupled first-difference estimates.
  {
    const sim::PbdpSpec spec(chain::BirthDeathParams(3, 0.3, 0.05),
                             carrier::CarrierSpace::unit_interval(),
                             carrier::DiscreteMeasure({{0.25, 0.5}, {0.75, 0.5}}));
    const carrier::PointPattern eta({0.2, 0.4, 0.6, 0.8});
    const carrier::PointPattern ref({0.3, 0.7});
    const sim::PatternFn f = [&](const carrier::PointPattern& xi) {
      if (xi.size() != ref.size()) return 1.0;
      return carrier::d1(spec.space, xi, ref);
    };
    const auto reps = static_cast<std::int64_t>(200000 * scale);
    stats::MeanStderr a, b;
    sim::estimate_first_difference(spec, eta, 0.25, 0.75, f, reps / 10, 4);  // warm-up
    parallel::set_enabled(false);
    const double ts = time_of(
        [&] { a = sim::estimate_first_difference(spec, eta, 0.25, 0.75, f, reps, 4); });
    parallel::set_enabled(true);
    const double tp = time_of(
        [&] { b = sim::estimate_first_difference(spec, eta, 0.25, 0.75, f, reps, 4); });
    if (a.mean != b.mean) {
      std::printf("MISMATCH in first-difference kernel\n");
      return 1;
    }
    report("first-difference replicates", ts, tp);
  }

  // Pairwise d1 cost matrix.
  {
    const models::ModelSpec model{models::BernoulliModel(256, 0.2)};
    const auto n = static_cast<std::int64_t>(220 * scale);
    const auto patterns = parallel::map_replicates_serial<carrier::PointPattern>(
        9, n, [&](std::int64_t, rng::Stream& rng) { return models::sample(model, rng); });
    const auto space = models::space_of(model);
    Matrix ms, mp;
    distance::pairwise_d1_serial(space, patterns, patterns);  // warm-up
    const double ts = time_of([&] { ms = distance::pairwise_d1_serial(space, patterns, patterns); });
    const double tp =
        time_of([&] { mp = distance::pairwise_d1_parallel(space, patterns, patterns); });
    if (ms.data() != mp.data()) {
      std::printf("MISMATCH in pairwise d1 kernel\n");
      return 1;
    }
    report("pairwise d1 cost matrix", ts, tp);
  }

  // Survival-curve replicates (count-only simulation).
  {
    const sim::PbdpSpec spec(chain::BirthDeathParams(2, 0.2, 0),
                             carrier::CarrierSpace::unit_interval(),
                             carrier::DiscreteMeasure({{0.5, 1.0}}));
    const std::vector<double> times{0.1, 0.5, 1.0, 2.0, 3.0};
    const auto reps = static_cast<std::int64_t>(400000 * scale);
    std::vector<stats::MeanStderr> a, b;
    sim::survival_ratio_curve(spec, 6, times, reps / 10, 7);  // warm-up
    parallel::set_enabled(false);
    const double ts = time_of([&] { a = sim::survival_ratio_curve(spec, 6, times, reps, 7); });
    parallel::set_enabled(true);
    const double tp = time_of([&] { b = sim::survival_ratio_curve(spec, 6, times, reps, 7); });
    for (std::size_t i = 0; i < times.size(); ++i)
      if (a[i].mean != b[i].mean) {
        std::printf("MISMATCH in survival kernel\n");
        return 1;
      }
    report("survival-curve replicates", ts, tp);
  }
  return 0;
}
