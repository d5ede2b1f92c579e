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

#ifndef PBD_ASSIGNMENT_HPP_
#define PBD_ASSIGNMENT_HPP_

#include <vector>

#include "pbd/matrix.hpp"

namespace pbd::carrier {

struct AssignmentResult {
  // row_to_col[i] is the column matched to row i.
  std::vector<int> row_to_col;
  double cost = 0;
};

// Exact minimum-cost perfect assignment on a square cost matrix (shortest
// augmenting paths with dual potentials).  Among cost-optimal assignments the
// lexicographically smallest permutation is returned, so outputs are stable
// across runs and platforms.  Throws on non-square or non-finite input.
AssignmentResult solve_assignment(const Matrix& cost);

// Optimal assignment cost only; skips the lexicographic tie resolution.
double assignment_cost(const Matrix& cost);

}  // namespace pbd::carrier

#endif  // PBD_ASSIGNMENT_HPP_
