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

#include "pbd/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pbd/assignment.hpp"
#include "pbd/parallel.hpp"
#include "pbd/stats.hpp"
#include "pbd/transport.hpp"

namespace pbd::distance {

std::string method_name(Method method) {
  switch (method) {
    case Method::empirical_ot: return "empirical-OT";
    case Method::exact_enumeration: return "exact-enumeration";
    case Method::coupling_bound: return "coupling-bound";
  }
  return "?";
}

Matrix pairwise_d1_serial(const carrier::CarrierSpace& space,
                          const std::vector<carrier::PointPattern>& a,
                          const std::vector<carrier::PointPattern>& b) {
  Matrix cost(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) cost(i, j) = carrier::d1(space, a[i], b[j]);
  return cost;
}

Matrix pairwise_d1_parallel(const carrier::CarrierSpace& space,
                            const std::vector<carrier::PointPattern>& a,
                            const std::vector<carrier::PointPattern>& b) {
  Matrix cost(a.size(), b.size());
  const std::int64_t rows = static_cast<std::int64_t>(a.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      cost(static_cast<std::size_t>(i), j) = carrier::d1(space, a[static_cast<std::size_t>(i)], b[j]);
  return cost;
}

Matrix pairwise_d1(const carrier::CarrierSpace& space,
                   const std::vector<carrier::PointPattern>& a,
                   const std::vector<carrier::PointPattern>& b) {
  return parallel::enabled() ? pairwise_d1_parallel(space, a, b)
                             : pairwise_d1_serial(space, a, b);
}

namespace {

double assignment_value_of_subset(const Matrix& full, const std::vector<int>& rows,
                                  const std::vector<int>& cols) {
  const std::size_t m = rows.size();
  Matrix sub(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      sub(i, j) = full(static_cast<std::size_t>(rows[i]), static_cast<std::size_t>(cols[j]));
  return carrier::assignment_cost(sub) / static_cast<double>(m);
}

std::vector<int> sample_subset(int n, int m, rng::Stream& rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < m; ++i) {
    const auto j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(m));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

D2Estimate empirical_d2(const carrier::CarrierSpace& space, const Sampler& sampler1,
                        const Sampler& sampler2, int n_samples, std::uint64_t seed1,
                        std::uint64_t seed2, int bootstrap_resamples) {
  if (n_samples < 2) throw std::invalid_argument("empirical_d2: need at least 2 samples");

  auto draw = [&](const Sampler& s, std::uint64_t seed) {
    return parallel::map_replicates<carrier::PointPattern>(
        seed, n_samples, [&s](std::int64_t, rng::Stream& rng) { return s(rng); });
  };
  const std::vector<carrier::PointPattern> a = draw(sampler1, seed1);
  const std::vector<carrier::PointPattern> b = draw(sampler2, seed2);

  const Matrix cost = pairwise_d1(space, a, b);
  D2Estimate est;
  est.method = Method::empirical_ot;
  est.n_samples = n_samples;
  est.seed = seed1;
  est.value = carrier::assignment_cost(cost) / static_cast<double>(n_samples);

  // Half-size subsample resampling on the cached cost matrix; the statistic's
  // spread at size n/2 is scaled down by sqrt(1/2) to apply at size n.
  const int m = n_samples / 2;
  if (m >= 2 && bootstrap_resamples > 0) {
    const std::uint64_t boot_seed = rng::mix64(seed1 ^ 0xb00f5a93u) ^ seed2;
    const std::vector<double> boots = parallel::map_replicates<double>(
        boot_seed, bootstrap_resamples, [&](std::int64_t, rng::Stream& rng) {
          const auto rows = sample_subset(n_samples, m, rng);
          const auto cols = sample_subset(n_samples, m, rng);
          return assignment_value_of_subset(cost, rows, cols);
        });
    const auto summary = stats::summarize(boots);
    const double sd = summary.stderr_ * std::sqrt(static_cast<double>(boots.size()));
    est.stderr_ = sd / std::sqrt(2.0);
  }
  return est;
}

D2Estimate exact_d2_small(const ConfigDistribution& dist1, const ConfigDistribution& dist2) {
  if (!dist1.space.same_kind(dist2.space))
    throw std::invalid_argument("exact_d2_small: distributions live on different spaces");
  if (dist1.configs.size() != dist1.probs.size() || dist2.configs.size() != dist2.probs.size())
    throw std::invalid_argument("exact_d2_small: configs/probs size mismatch");
  const std::size_t n1 = dist1.configs.size(), n2 = dist2.configs.size();
  if (n1 > 10000 || n2 > 10000 || n1 * n2 > 25000000)
    throw std::invalid_argument("exact_d2_small: enumeration too large");

  const double t1 = stats::kahan_sum(dist1.probs);
  const double t2 = stats::kahan_sum(dist2.probs);
  if (std::fabs(t1 - 1.0) > 1e-6 || std::fabs(t2 - 1.0) > 1e-6)
    throw std::invalid_argument("exact_d2_small: masses must be within 1e-6 of 1");

  std::vector<double> supply(dist1.probs.begin(), dist1.probs.end());
  std::vector<double> demand(dist2.probs.begin(), dist2.probs.end());
  for (double& s : supply) s /= t1;
  for (double& d : demand) d /= t2;

  const Matrix cost = pairwise_d1(dist1.space, dist1.configs, dist2.configs);
  D2Estimate est;
  est.method = Method::exact_enumeration;
  est.n_samples = static_cast<std::int64_t>(n1 + n2);
  est.value = carrier::solve_transport(supply, demand, cost).cost;
  est.stderr_ = 0;
  return est;
}

double coupling_bound(const sim::PbdpSpec& spec1, const sim::PbdpSpec& spec2, double tol) {
  if (!spec1.space.same_kind(spec2.space))
    throw std::invalid_argument("coupling_bound: processes live on different spaces");
  const chain::CountDistribution pi1 = chain::stationary(spec1.params, tol);
  const chain::CountDistribution pi2 = chain::stationary(spec2.params, tol);
  return chain::tv_distance(pi1, pi2) + carrier::w1_measures(spec1.space, spec1.nu, spec2.nu);
}

ConfigDistribution enumerate_pbdp(const sim::PbdpSpec& spec, int count_cap) {
  if (spec.space.kind() != carrier::SpaceKind::finite_sites)
    throw std::invalid_argument("enumerate_pbdp: finite-site spaces only");
  const int sites = spec.space.site_count();
  if (sites > 4) throw std::invalid_argument("enumerate_pbdp: at most 4 sites");
  if (count_cap < 0 || count_cap > 10)
    throw std::invalid_argument("enumerate_pbdp: count cap must lie in [0, 10]");

  const chain::CountDistribution pi = chain::stationary(spec.params, 1e-12);
  double beyond = pi.tail_bound;
  for (int k = count_cap + 1; k <= pi.max_count(); ++k)
    beyond += pi.probs[static_cast<std::size_t>(k)];
  if (beyond > 1e-9) {
    std::ostringstream msg;
    msg << "enumerate_pbdp: mass " << beyond << " lies beyond the count cap "
        << count_cap << "; raise the cap or shrink the process";
    throw std::invalid_argument(msg.str());
  }

  std::vector<double> site_weight(static_cast<std::size_t>(sites), 0.0);
  for (const auto& [x, w] : spec.nu.atoms())
    site_weight[static_cast<std::size_t>(std::llround(x))] += w;

  ConfigDistribution out{spec.space, {}, {}};
  std::vector<int> counts(static_cast<std::size_t>(sites), 0);
  std::vector<double> log_fact(static_cast<std::size_t>(count_cap) + 1, 0.0);
  for (int i = 2; i <= count_cap; ++i)
    log_fact[static_cast<std::size_t>(i)] =
        log_fact[static_cast<std::size_t>(i - 1)] + std::log(static_cast<double>(i));

  // Depth-first enumeration of count vectors with total <= count_cap.
  auto emit = [&]() {
    int total = 0;
    for (int c : counts) total += c;
    if (total > pi.max_count()) return;
    double log_mult = log_fact[static_cast<std::size_t>(total)];
    double placement = 1.0;
    for (int s = 0; s < sites; ++s) {
      const int c = counts[static_cast<std::size_t>(s)];
      log_mult -= log_fact[static_cast<std::size_t>(c)];
      for (int rep = 0; rep < c; ++rep) placement *= site_weight[static_cast<std::size_t>(s)];
    }
    const double prob = pi.probs[static_cast<std::size_t>(total)] * std::exp(log_mult) * placement;
    std::vector<carrier::Point> pts;
    for (int s = 0; s < sites; ++s)
      for (int rep = 0; rep < counts[static_cast<std::size_t>(s)]; ++rep)
        pts.push_back(static_cast<carrier::Point>(s));
    out.configs.emplace_back(std::move(pts));
    out.probs.push_back(prob);
  };
  std::function<void(int, int)> rec = [&](int site, int remaining) {
    if (site == sites - 1) {
      for (int c = 0; c <= remaining; ++c) {
        counts[static_cast<std::size_t>(site)] = c;
        emit();
      }
      counts[static_cast<std::size_t>(site)] = 0;
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[static_cast<std::size_t>(site)] = c;
      rec(site + 1, remaining - c);
    }
    counts[static_cast<std::size_t>(site)] = 0;
  };
  rec(0, count_cap);

  const double mass = stats::kahan_sum(out.probs);
  if (mass < 1.0 - 1e-9)
    throw std::logic_error("enumerate_pbdp: enumerated mass " + std::to_string(mass) +
                           " fell below 1 - 1e-9");
  return out;
}

ConfigDistribution enumerate_bernoulli(const models::BernoulliModel& model) {
  if (model.n > 20)
    throw std::invalid_argument("enumerate_bernoulli: 2^n outcomes; n must be <= 20");
  const int n = model.n;
  Matrix dist(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      dist(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          std::fabs(models::site_position(i + 1, n) - models::site_position(j + 1, n));
  ConfigDistribution out{carrier::CarrierSpace::finite_sites(std::move(dist)), {}, {}};
  const std::uint32_t total = 1u << n;
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    double prob = 1.0;
    std::vector<carrier::Point> pts;
    for (int i = 0; i < n; ++i) {
      const double q = model.p[static_cast<std::size_t>(i)];
      if (mask & (1u << i)) {
        prob *= q;
        pts.push_back(static_cast<carrier::Point>(i));
      } else {
        prob *= 1.0 - q;
      }
    }
    out.configs.emplace_back(std::move(pts));
    out.probs.push_back(prob);
  }
  return out;
}

sim::PbdpSpec to_site_space(const sim::PbdpSpec& spec,
                            std::span<const carrier::Point> positions) {
  const int n = static_cast<int>(positions.size());
  Matrix dist(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      dist(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          spec.space.distance(positions[static_cast<std::size_t>(i)],
                              positions[static_cast<std::size_t>(j)]);
  carrier::CarrierSpace site_space = carrier::CarrierSpace::finite_sites(std::move(dist));

  std::vector<std::pair<carrier::Point, double>> atoms;
  for (const auto& [x, w] : spec.nu.atoms()) {
    int site = -1;
    for (int i = 0; i < n; ++i)
      if (positions[static_cast<std::size_t>(i)] == x) {
        site = i;
        break;
      }
    if (site < 0)
      throw std::invalid_argument("to_site_space: placement atom off the site grid");
    atoms.emplace_back(static_cast<carrier::Point>(site), w);
  }
  return sim::PbdpSpec(spec.params, std::move(site_space),
                       carrier::DiscreteMeasure(std::move(atoms)));
}

}  // namespace pbd::distance
