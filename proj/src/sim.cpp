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

#include "pbd/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pbd/parallel.hpp"

namespace pbd::sim {

PbdpSpec::PbdpSpec(chain::BirthDeathParams p, carrier::CarrierSpace s,
                   carrier::DiscreteMeasure placement)
    : params(p), space(std::move(s)), nu(std::move(placement)) {
  if (!nu.is_probability(1e-12))
    throw std::invalid_argument("PbdpSpec: nu must have total mass 1");
  for (const auto& [x, w] : nu.atoms())
    if (!space.contains(x)) throw std::invalid_argument("PbdpSpec: nu atom outside the space");
}

int sample_count(const chain::CountDistribution& dist, rng::Stream& rng) {
  const double u = rng.uniform();
  double acc = 0;
  for (std::size_t k = 0; k < dist.probs.size(); ++k) {
    acc += dist.probs[k];
    if (u < acc) return static_cast<int>(k);
  }
  return dist.max_count();
}

namespace {

std::vector<double> cumulative(std::span<const double> values) {
  std::vector<double> cdf(values.size());
  stats::KahanAccumulator acc;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc.add(values[i]);
    cdf[i] = acc.sum();
  }
  return cdf;
}

std::size_t draw_from_cdf(std::span<const double> cdf, rng::Stream& rng) {
  const double u = rng.uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

carrier::Point draw_atom(const carrier::DiscreteMeasure& nu, rng::Stream& rng) {
  double u = rng.uniform() * nu.total();
  double acc = 0;
  const auto& atoms = nu.atoms();
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
    acc += atoms[i].second;
    if (u < acc) return atoms[i].first;
  }
  return atoms.back().first;
}

}  // namespace

carrier::PointPattern sample_pbdp(const PbdpSpec& spec, const chain::CountDistribution& dist,
                                  rng::Stream& rng) {
  const int count = sample_count(dist, rng);
  std::vector<carrier::Point> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) pts.push_back(draw_atom(spec.nu, rng));
  return carrier::PointPattern(std::move(pts));
}

PbdpSampler::PbdpSampler(PbdpSpec spec, double tol)
    : spec_(std::move(spec)), dist_(chain::stationary(spec_.params, tol)) {
  count_cdf_ = cumulative(dist_.probs);
  std::vector<double> weights;
  for (const auto& [x, w] : spec_.nu.atoms()) {
    atom_points_.push_back(x);
    weights.push_back(w);
  }
  atom_cdf_ = cumulative(weights);
}

carrier::PointPattern PbdpSampler::operator()(rng::Stream& rng) const {
  const auto count = draw_from_cdf(count_cdf_, rng);
  std::vector<carrier::Point> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    pts.push_back(atom_points_[draw_from_cdf(atom_cdf_, rng)]);
  return carrier::PointPattern(std::move(pts));
}

SystemTrajectory simulate_system(const PbdpSpec& spec, const carrier::PointPattern& initial,
                                 double horizon, rng::Stream& rng) {
  if (!(horizon > 0)) throw std::invalid_argument("simulate_system: horizon must be > 0");
  for (carrier::Point p : initial.points())
    if (!spec.space.contains(p))
      throw std::invalid_argument("simulate_system: initial point outside the space");

  SystemTrajectory traj;
  traj.initial = initial;
  std::vector<carrier::Point> alive = initial.points();
  double t = 0;
  const auto& prm = spec.params;
  for (;;) {
    const double n = static_cast<double>(alive.size());
    const double birth_total = prm.birth_rate(n);
    const double death_total = prm.death_rate(n);
    const double total = birth_total + death_total;
    t += rng.exponential(total);
    if (t >= horizon) break;

    const double u = rng.uniform() * total;
    Event ev;
    ev.time = t;
    if (u < birth_total) {
      ev.kind = (u < prm.a) ? EventKind::immigration : EventKind::birth;
      ev.point = draw_atom(spec.nu, rng);
      alive.push_back(ev.point);
    } else {
      // Suicide with sub-rate n, kill with sub-rate beta*n*(n-1); the victim
      // is uniform among the living either way.
      ev.kind = (u < birth_total + n) ? EventKind::natural_death : EventKind::kill;
      const std::size_t victim = rng.uniform_index(alive.size());
      ev.point = alive[victim];
      alive[victim] = alive.back();
      alive.pop_back();
    }
    traj.events.push_back(ev);
  }
  return traj;
}

carrier::PointPattern pattern_at(const SystemTrajectory& traj, double t) {
  carrier::PointPattern pattern = traj.initial;
  for (const auto& ev : traj.events) {
    if (ev.time > t) break;
    if (ev.kind == EventKind::immigration || ev.kind == EventKind::birth)
      pattern.insert(ev.point);
    else
      pattern.remove_one(ev.point);
  }
  return pattern;
}

chain::CountDistribution occupation_distribution(const SystemTrajectory& traj, double horizon) {
  std::vector<double> time_in;
  int size = traj.initial.size();
  double prev = 0;
  auto deposit = [&](int s, double dt) {
    if (static_cast<std::size_t>(s) >= time_in.size()) time_in.resize(static_cast<std::size_t>(s) + 1, 0.0);
    time_in[static_cast<std::size_t>(s)] += dt;
  };
  for (const auto& ev : traj.events) {
    if (ev.time >= horizon) break;
    deposit(size, ev.time - prev);
    prev = ev.time;
    size += (ev.kind == EventKind::immigration || ev.kind == EventKind::birth) ? 1 : -1;
  }
  deposit(size, horizon - prev);
  chain::CountDistribution out;
  out.probs = std::move(time_in);
  for (double& p : out.probs) p /= horizon;
  return out;
}

stats::MeanStderr estimate_first_difference(const PbdpSpec& spec,
                                            const carrier::PointPattern& eta,
                                            carrier::Point x, carrier::Point y,
                                            const PatternFn& f, std::int64_t reps,
                                            std::uint64_t seed) {
  if (!spec.space.contains(x) || !spec.space.contains(y))
    throw std::invalid_argument("estimate_first_difference: point outside the space");
  const auto& prm = spec.params;
  const std::vector<carrier::Point> base = eta.points();

  auto one_replicate = [&](std::int64_t, rng::Stream& rng) -> double {
    // Particle soup; slot 0 holds the distinguished particle at x.
    std::vector<carrier::Point> alive;
    alive.reserve(base.size() + 4);
    alive.push_back(x);
    alive.insert(alive.end(), base.begin(), base.end());
    std::size_t marked = 0;  // index of the distinguished particle
    stats::KahanAccumulator integral;
    for (;;) {
      const double n = static_cast<double>(alive.size());
      const double birth_total = prm.birth_rate(n);
      const double death_total = prm.death_rate(n);
      const double dt = rng.exponential(birth_total + death_total);

      // Coupled gap on the current state: the paired system is identical
      // except the marked particle sits at y.
      std::vector<carrier::Point> with_x = alive;
      std::vector<carrier::Point> with_y = alive;
      with_y[marked] = y;
      const double gap = f(carrier::PointPattern(std::move(with_x))) -
                         f(carrier::PointPattern(std::move(with_y)));
      integral.add(gap * dt);

      const double u = rng.uniform() * (birth_total + death_total);
      if (u < birth_total) {
        alive.push_back(draw_atom(spec.nu, rng));
      } else {
        const std::size_t victim = rng.uniform_index(alive.size());
        if (victim == marked) return integral.sum();  // coupled paths merge here
        if (victim == alive.size() - 1) {
          alive.pop_back();
        } else {
          alive[victim] = alive.back();
          alive.pop_back();
          if (marked == alive.size()) marked = victim;
        }
      }
    }
  };

  const std::vector<double> vals =
      parallel::map_replicates<double>(seed, reps, one_replicate);
  return stats::summarize(vals);
}

std::vector<stats::MeanStderr> survival_ratio_curve(const PbdpSpec& spec, int initial_size,
                                                    std::span<const double> times,
                                                    std::int64_t reps, std::uint64_t seed) {
  if (initial_size < 1)
    throw std::invalid_argument("survival_ratio_curve: need at least one initial particle");
  std::vector<double> sorted_times(times.begin(), times.end());
  std::sort(sorted_times.begin(), sorted_times.end());
  const double t_max = sorted_times.empty() ? 0.0 : sorted_times.back();
  const auto& prm = spec.params;
  const std::size_t nt = sorted_times.size();

  // Locations never matter for the survival fraction: track only the living
  // count and how many of them are initial particles.
  auto one_replicate = [&](std::int64_t, rng::Stream& rng) -> std::vector<double> {
    std::vector<double> ratios(nt, 0.0);
    long size = initial_size;
    long initial_alive = initial_size;
    double t = 0;
    std::size_t cursor = 0;
    while (cursor < nt) {
      const double nd = static_cast<double>(size);
      const double birth_total = prm.birth_rate(nd);
      const double death_total = prm.death_rate(nd);
      const double total = birth_total + death_total;
      const double dt = total > 0 ? rng.exponential(total) : (t_max - t + 1.0);
      while (cursor < nt && sorted_times[cursor] < t + dt) {
        ratios[cursor] =
            size > 0 ? static_cast<double>(initial_alive) / static_cast<double>(size) : 0.0;
        ++cursor;
      }
      t += dt;
      if (cursor >= nt) break;
      if (rng.uniform() * total < birth_total) {
        ++size;
      } else {
        if (static_cast<long>(rng.uniform_index(static_cast<std::uint64_t>(size))) <
            initial_alive)
          --initial_alive;
        --size;
      }
    }
    return ratios;
  };

  const auto rows = parallel::map_replicates<std::vector<double>>(seed, reps, one_replicate);
  std::vector<stats::MeanStderr> out(nt);
  std::vector<double> column(static_cast<std::size_t>(reps));
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::size_t r = 0; r < rows.size(); ++r) column[r] = rows[r][j];
    out[j] = stats::summarize(column);
  }
  return out;
}

double survival_ratio_bound(const chain::BirthDeathParams& params, int initial_size, double t) {
  const double n = static_cast<double>(initial_size);
  const double first = 1.0 / (1.0 + params.a / (2.0 * n) * std::expm1(t));
  const double floor_rate = std::min(params.a, params.b);
  const double second = std::exp(-floor_rate * t);
  return std::min(first, second);
}

}  // namespace pbd::sim
