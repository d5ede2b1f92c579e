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

#ifndef PBD_TRANSPORT_HPP_
#define PBD_TRANSPORT_HPP_

#include <span>
#include <tuple>
#include <vector>

#include "pbd/matrix.hpp"

namespace pbd::carrier {

struct TransportResult {
  // (source index, sink index, mass moved), positive masses only.
  std::vector<std::tuple<int, int, double>> plan;
  double cost = 0;
  // Dual potentials; at optimality every arc satisfies
  // cost(i,j) + source_potential[i] - sink_potential[j] >= 0, with equality
  // on arcs carrying flow.
  std::vector<double> source_potential;
  std::vector<double> sink_potential;
};

// Exact balanced transportation problem on a dense bipartite graph, solved by
// successive shortest augmenting paths over the residual network with
// potentials.  Requires sum(supply) == sum(demand) within 1e-9 relative and
// finite costs.
TransportResult solve_transport(std::span<const double> supply,
                                std::span<const double> demand, const Matrix& cost);

}  // namespace pbd::carrier

#endif  // PBD_TRANSPORT_HPP_
