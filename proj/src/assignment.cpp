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

#include "pbd/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pbd/stats.hpp"

namespace pbd::carrier {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_input(const Matrix& cost) {
  if (!cost.square()) throw std::invalid_argument("solve_assignment: matrix must be square");
  for (double v : cost.data())
    if (!std::isfinite(v)) throw std::invalid_argument("solve_assignment: entries must be finite");
}

// Shortest augmenting path assignment with dual potentials.  Fills the
// column-to-row matching and the dual variables u (rows), v (columns),
// both 1-based with index 0 as sentinel.
void jv_solve(const Matrix& a, std::vector<int>& p, std::vector<double>& u,
              std::vector<double>& v) {
  const int n = static_cast<int>(a.rows());
  u.assign(n + 1, 0.0);
  v.assign(n + 1, 0.0);
  p.assign(n + 1, 0);
  std::vector<int> way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
}

double permutation_cost(const Matrix& a, const std::vector<int>& row_to_col) {
  stats::KahanAccumulator acc;
  for (std::size_t i = 0; i < row_to_col.size(); ++i)
    acc.add(a(i, static_cast<std::size_t>(row_to_col[i])));
  return acc.sum();
}

// Resolves ties toward the lexicographically smallest optimal permutation.
// Every optimal assignment is a perfect matching of the zero-reduced-cost
// graph; an edge lies on some such matching iff it is matched or its
// endpoints share a strongly connected component of the alternating digraph
// (unmatched tight edges row->col, matched edges col->row).  Rows are fixed
// in order, each to its smallest admissible column.
class LexicographicRefiner {
 public:
  LexicographicRefiner(const Matrix& a, std::vector<int> row_to_col,
                       const std::vector<double>& u, const std::vector<double>& v)
      : n_(static_cast<int>(a.rows())), row_to_col_(std::move(row_to_col)) {
    double scale = 1.0;
    for (double x : a.data()) scale = std::max(scale, std::fabs(x));
    const double tol = 1e-10 * scale;
    tight_.assign(static_cast<std::size_t>(n_) * n_, 0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        tight_[idx(i, j)] = std::fabs(a(i, j) - u[i + 1] - v[j + 1]) <= tol ? 1 : 0;
    col_to_row_.assign(n_, -1);
    for (int i = 0; i < n_; ++i) col_to_row_[row_to_col_[i]] = i;
    alive_row_.assign(n_, 1);
    alive_col_.assign(n_, 1);
  }

  std::vector<int> refine() {
    for (int i = 0; i < n_; ++i) {
      compute_scc();
      int best = -1;
      for (int j = 0; j < n_; ++j) {
        if (!alive_col_[j] || !tight_[idx(i, j)]) continue;
        if (row_to_col_[i] == j || scc_[i] == scc_[n_ + j]) {
          best = j;
          break;
        }
      }
      if (best < 0) throw std::logic_error("assignment tie resolution lost the matching");
      if (row_to_col_[i] != best) rematch(i, best);
      alive_row_[i] = 0;
      alive_col_[best] = 0;
    }
    return row_to_col_;
  }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + j;
  }

  // Iterative Tarjan over rows (0..n-1) and columns (n..2n-1).
  void compute_scc() {
    const int total = 2 * n_;
    scc_.assign(total, -1);
    index_.assign(total, -1);
    low_.assign(total, 0);
    on_stack_.assign(total, 0);
    stack_.clear();
    int next_index = 0, next_comp = 0;
    std::vector<std::pair<int, int>> call;  // (node, neighbor cursor)
    for (int s = 0; s < total; ++s) {
      if (index_[s] != -1 || !alive(s)) continue;
      call.emplace_back(s, 0);
      while (!call.empty()) {
        const int v = call.back().first;
        int& cursor = call.back().second;
        if (cursor == 0) {
          index_[v] = low_[v] = next_index++;
          stack_.push_back(v);
          on_stack_[v] = 1;
        }
        const int w = next_neighbor(v, cursor);
        if (w >= 0) {
          if (index_[w] == -1) {
            call.emplace_back(w, 0);
          } else if (on_stack_[w]) {
            low_[v] = std::min(low_[v], index_[w]);
          }
        } else {
          if (low_[v] == index_[v]) {
            for (;;) {
              const int w2 = stack_.back();
              stack_.pop_back();
              on_stack_[w2] = 0;
              scc_[w2] = next_comp;
              if (w2 == v) break;
            }
            ++next_comp;
          }
          call.pop_back();
          if (!call.empty()) {
            const int parent = call.back().first;
            low_[parent] = std::min(low_[parent], low_[v]);
          }
        }
      }
    }
  }

  bool alive(int node) const {
    return node < n_ ? alive_row_[node] != 0 : alive_col_[node - n_] != 0;
  }

  // Enumerates outgoing arcs of `v`, advancing `cursor`; returns -1 when done.
  int next_neighbor(int v, int& cursor) {
    if (v >= n_) {  // column node: single arc to its matched row
      const int c = v - n_;
      if (cursor++ == 0) {
        const int r = col_to_row_[c];
        if (r >= 0 && alive_row_[r]) return r;
      }
      return -1;
    }
    while (cursor < n_) {
      const int j = cursor++;
      if (!alive_col_[j] || !tight_[idx(v, j)]) continue;
      if (row_to_col_[v] == j) continue;  // matched edges run col -> row
      return n_ + j;
    }
    return -1;
  }

  // Forces (row, col) into the matching by flipping the alternating cycle
  // closed by a directed path from the column back to the row.
  void rematch(int row, int col) {
    const int total = 2 * n_;
    std::vector<int> parent(total, -2);
    std::vector<int> dfs{n_ + col};
    parent[n_ + col] = -1;
    while (!dfs.empty()) {
      const int v = dfs.back();
      dfs.pop_back();
      if (v == row) break;
      int cursor = 0;
      for (;;) {
        const int w = next_neighbor(v, cursor);
        if (w < 0) break;
        if (parent[w] == -2) {
          parent[w] = v;
          dfs.push_back(w);
        }
      }
    }
    if (parent[row] == -2) throw std::logic_error("assignment tie resolution: no alternating path");
    std::vector<int> path;
    for (int w = row; w != -1; w = parent[w]) path.push_back(w);
    std::reverse(path.begin(), path.end());
    // The path alternates col, row, col, row, ..., ending at `row`.  Each row
    // node moves onto the tight column that follows it; `row` itself takes
    // the forced column.
    for (std::size_t k = 1; k + 1 < path.size(); k += 2) {
      const int r = path[k];
      const int c = path[k + 1] - n_;
      row_to_col_[r] = c;
      col_to_row_[c] = r;
    }
    row_to_col_[row] = col;
    col_to_row_[col] = row;
  }

  int n_;
  std::vector<int> row_to_col_;
  std::vector<int> col_to_row_;
  std::vector<char> tight_;
  std::vector<char> alive_row_, alive_col_;
  std::vector<int> scc_, index_, low_;
  std::vector<char> on_stack_;
  std::vector<int> stack_;
};

}  // namespace

AssignmentResult solve_assignment(const Matrix& cost) {
  check_input(cost);
  AssignmentResult out;
  const int n = static_cast<int>(cost.rows());
  if (n == 0) return out;

  std::vector<int> p;
  std::vector<double> u, v;
  jv_solve(cost, p, u, v);
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  const double base_cost = permutation_cost(cost, row_to_col);

  LexicographicRefiner refiner(cost, row_to_col, u, v);
  std::vector<int> refined = refiner.refine();
  const double refined_cost = permutation_cost(cost, refined);

  double scale = 1.0;
  for (double x : cost.data()) scale = std::max(scale, std::fabs(x));
  if (refined_cost > base_cost + 1e-8 * scale * n)
    throw std::logic_error("assignment tie resolution changed the optimal cost");

  out.row_to_col = std::move(refined);
  out.cost = std::min(base_cost, refined_cost);
  return out;
}

double assignment_cost(const Matrix& cost) {
  check_input(cost);
  if (cost.rows() == 0) return 0;
  std::vector<int> p;
  std::vector<double> u, v;
  jv_solve(cost, p, u, v);
  const int n = static_cast<int>(cost.rows());
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return permutation_cost(cost, row_to_col);
}

}  // namespace pbd::carrier
