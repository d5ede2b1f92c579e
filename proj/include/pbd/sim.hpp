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

#ifndef PBD_SIM_HPP_
#define PBD_SIM_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pbd/carrier.hpp"
#include "pbd/chain.hpp"
#include "pbd/rng.hpp"
#include "pbd/stats.hpp"

namespace pbd::sim {

// A stationary point process: a count drawn from the birth-death stationary
// law with independent point placements from nu.
struct PbdpSpec {
  chain::BirthDeathParams params;
  carrier::CarrierSpace space;
  carrier::DiscreteMeasure nu;  // probability measure on the space

  PbdpSpec(chain::BirthDeathParams p, carrier::CarrierSpace s, carrier::DiscreteMeasure placement);
};

// Inverse-CDF draw from a normalized count distribution.
int sample_count(const chain::CountDistribution& dist, rng::Stream& rng);

// Draws the count from the stationary law, then that many iid points from nu.
carrier::PointPattern sample_pbdp(const PbdpSpec& spec, const chain::CountDistribution& dist,
                                  rng::Stream& rng);

// Sampler with the stationary distribution and atom table precomputed.
class PbdpSampler {
 public:
  explicit PbdpSampler(PbdpSpec spec, double tol = 1e-12);
  carrier::PointPattern operator()(rng::Stream& rng) const;
  const chain::CountDistribution& count_distribution() const { return dist_; }
  const PbdpSpec& spec() const { return spec_; }

 private:
  PbdpSpec spec_;
  chain::CountDistribution dist_;
  std::vector<double> count_cdf_;
  std::vector<carrier::Point> atom_points_;
  std::vector<double> atom_cdf_;
};

enum class EventKind { immigration, birth, natural_death, kill };

struct Event {
  double time = 0;
  EventKind kind = EventKind::immigration;
  carrier::Point point = 0;
};

struct SystemTrajectory {
  carrier::PointPattern initial;
  std::vector<Event> events;
};

// Exact event-driven simulation of the particle system up to the horizon:
// immigration at rate a, per-particle birth at rate b (new point from nu),
// per-particle suicide at rate 1 and pair kills at rate beta, with the victim
// uniform among the living.
SystemTrajectory simulate_system(const PbdpSpec& spec, const carrier::PointPattern& initial,
                                 double horizon, rng::Stream& rng);

// Pattern obtained by replaying the trajectory up to time t.
carrier::PointPattern pattern_at(const SystemTrajectory& traj, double t);

// Time-weighted distribution of the population size over [0, horizon].
chain::CountDistribution occupation_distribution(const SystemTrajectory& traj, double horizon);

using PatternFn = std::function<double(const carrier::PointPattern&)>;

// Monte Carlo estimate of the difference of the Stein solution at eta+delta_x
// versus eta+delta_y for a d1-Lipschitz test function: two systems are
// coupled so they differ only in the location of one distinguished particle,
// and the integrated test-function gap up to that particle's death time is
// averaged over replicates (the coupled paths coincide afterwards, so the
// contribution beyond it is exactly zero).
stats::MeanStderr estimate_first_difference(const PbdpSpec& spec,
                                            const carrier::PointPattern& eta,
                                            carrier::Point x, carrier::Point y,
                                            const PatternFn& f, std::int64_t reps,
                                            std::uint64_t seed);

// Expected fraction of the initial particles still alive at each requested
// time, estimated over `reps` replicates (0/0 counts as 0).
std::vector<stats::MeanStderr> survival_ratio_curve(const PbdpSpec& spec, int initial_size,
                                                    std::span<const double> times,
                                                    std::int64_t reps, std::uint64_t seed);

// Closed-form upper bound on the survival fraction at time t:
// min{ (1 + a(e^t - 1)/(2n))^{-1}, e^{-(a ∧ b) t} }.
double survival_ratio_bound(const chain::BirthDeathParams& params, int initial_size, double t);

}  // namespace pbd::sim

#endif  // PBD_SIM_HPP_
