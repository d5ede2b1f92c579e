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

#include "pbd/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pbd/stats.hpp"

namespace pbd::carrier {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TransportResult solve_transport(std::span<const double> supply,
                                std::span<const double> demand, const Matrix& cost) {
  const int n = static_cast<int>(supply.size());
  const int m = static_cast<int>(demand.size());
  if (cost.rows() != supply.size() || cost.cols() != demand.size())
    throw std::invalid_argument("solve_transport: cost matrix shape mismatch");
  for (double v : cost.data())
    if (!std::isfinite(v)) throw std::invalid_argument("solve_transport: costs must be finite");
  for (double s : supply)
    if (!(s >= 0)) throw std::invalid_argument("solve_transport: negative supply");
  for (double d : demand)
    if (!(d >= 0)) throw std::invalid_argument("solve_transport: negative demand");

  const double total_supply = stats::kahan_sum(supply);
  const double total_demand = stats::kahan_sum(demand);
  if (std::fabs(total_supply - total_demand) > 1e-9 * std::max(1.0, total_supply))
    throw std::invalid_argument("solve_transport: supply and demand masses differ");

  TransportResult out;
  out.source_potential.assign(n, 0.0);
  out.sink_potential.assign(m, 0.0);
  if (total_supply <= 0) return out;

  // Shift costs to be nonnegative; every unit of mass crosses exactly one
  // arc, so the shift is undone by reporting plan cost against the original
  // matrix and adjusting the sink potentials at the end.
  double shift = 0.0;
  for (double v : cost.data()) shift = std::min(shift, v);

  std::vector<double> rem_supply(supply.begin(), supply.end());
  std::vector<double> rem_demand(demand.begin(), demand.end());
  Matrix flow(n, m, 0.0);
  const double mass_eps = 1e-15 * std::max(1.0, total_supply);
  double pushed = 0;
  const double target = std::min(total_supply, total_demand);

  // Node layout: sources 0..n-1, sinks n..n+m-1.
  const int total_nodes = n + m;
  std::vector<double> dist(total_nodes);
  std::vector<int> parent(total_nodes);
  std::vector<char> done(total_nodes);
  const long max_iter = 50L * total_nodes + 1000;

  for (long iter = 0; pushed < target - mass_eps; ++iter) {
    if (iter > max_iter)
      throw std::runtime_error("solve_transport: augmentation limit exceeded");

    // Snapping tiny residuals to zero can discard up to (n+m) * mass_eps of
    // mass; stop once nothing usable remains on either side.
    bool supply_left = false, demand_left = false;
    for (int i = 0; i < n && !supply_left; ++i) supply_left = rem_supply[i] > mass_eps;
    for (int j = 0; j < m && !demand_left; ++j) demand_left = rem_demand[j] > mass_eps;
    if (!supply_left || !demand_left) break;

    // Dense Dijkstra on reduced costs from all sources with remaining supply.
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (int i = 0; i < n; ++i)
      if (rem_supply[i] > mass_eps) dist[i] = 0.0;

    int best_sink = -1;
    for (;;) {
      int v = -1;
      double best = kInf;
      for (int u = 0; u < total_nodes; ++u)
        if (!done[u] && dist[u] < best) {
          best = dist[u];
          v = u;
        }
      if (v < 0) break;
      done[v] = 1;
      if (v >= n) {
        // Relax backward arcs sink -> source (flow present).
        const int j = v - n;
        for (int i = 0; i < n; ++i) {
          if (flow(i, j) <= mass_eps) continue;
          const double rc_forward =
              (cost(i, j) - shift) + out.source_potential[i] - out.sink_potential[j];
          const double nd = dist[v] - rc_forward;
          if (nd < dist[i] - 1e-15) {
            dist[i] = nd;
            parent[i] = v;
          }
        }
      } else {
        // Relax forward arcs source -> sink.
        const int i = v;
        for (int j = 0; j < m; ++j) {
          const double nd =
              dist[v] + (cost(i, j) - shift) + out.source_potential[i] - out.sink_potential[j];
          if (nd < dist[n + j] - 1e-15) {
            dist[n + j] = nd;
            parent[n + j] = v;
          }
        }
      }
    }
    for (int j = 0; j < m; ++j)
      if (rem_demand[j] > mass_eps && dist[n + j] < kInf &&
          (best_sink < 0 || dist[n + j] < dist[n + best_sink]))
        best_sink = j;
    if (best_sink < 0)
      throw std::runtime_error("solve_transport: no augmenting path found");

    // Update potentials so reduced costs stay nonnegative.
    const double d_target = dist[n + best_sink];
    for (int i = 0; i < n; ++i)
      if (dist[i] < kInf) out.source_potential[i] += std::min(dist[i], d_target);
      else out.source_potential[i] += d_target;
    for (int j = 0; j < m; ++j)
      if (dist[n + j] < kInf) out.sink_potential[j] += std::min(dist[n + j], d_target);
      else out.sink_potential[j] += d_target;

    // Bottleneck along the path.
    double bottleneck = rem_demand[best_sink];
    for (int v = n + best_sink; parent[v] >= 0; v = parent[v]) {
      const int p = parent[v];
      if (v >= n) {
        // arc p(source) -> v(sink): capacity unlimited
      } else {
        // arc p(sink) -> v(source): backward, limited by existing flow
        bottleneck = std::min(bottleneck, flow(v, p - n));
      }
      if (parent[p] < 0 && p < n) bottleneck = std::min(bottleneck, rem_supply[p]);
    }
    if (!(bottleneck > 0))
      throw std::runtime_error("solve_transport: zero bottleneck");

    // Apply the augmentation.
    int v = n + best_sink;
    while (parent[v] >= 0) {
      const int p = parent[v];
      if (v >= n)
        flow(p, v - n) += bottleneck;
      else
        flow(v, p - n) -= bottleneck;
      v = p;
    }
    rem_supply[v] -= bottleneck;
    rem_demand[best_sink] -= bottleneck;
    if (rem_supply[v] < mass_eps) rem_supply[v] = 0;
    if (rem_demand[best_sink] < mass_eps) rem_demand[best_sink] = 0;
    pushed += bottleneck;
  }

  stats::KahanAccumulator total_cost;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (flow(i, j) > mass_eps) {
        out.plan.emplace_back(i, j, flow(i, j));
        total_cost.add(flow(i, j) * cost(i, j));
      }
  out.cost = total_cost.sum();
  // Undo the shift in the duals so the documented inequality holds against
  // the original costs.
  if (shift != 0.0)
    for (double& w : out.sink_potential) w += shift;
  return out;
}

}  // namespace pbd::carrier
