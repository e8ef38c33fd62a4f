// Copyright 2026 The lgmle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LGMLE_RR_GRAPH_HPP_
#define LGMLE_RR_GRAPH_HPP_

#include <iosfwd>
#include <utility>
#include <vector>

#include "json.hpp"

namespace lgmle {

// Unordered pair {i, j} with i < j, played in `round` (1-based). Node ids
// are 1-based throughout the public API.
struct Edge {
  int i = 0;
  int j = 0;
  int round = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// The n-regular graph collecting the first n rounds of the circle-method
// round-robin on N nodes. Node 1 is pinned; everything else rotates.
class RoundRobinGraph {
 public:
  int num_nodes() const { return num_nodes_; }
  int rounds() const { return rounds_; }
  // False when built through build_schedule_unchecked with n >= N/4.
  bool within_strict_bounds() const { return within_bounds_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Edges of round t (1-based), in position order.
  std::vector<Edge> round_edges(int t) const;

 private:
  friend RoundRobinGraph build_schedule_unchecked(int N, int n);

  int num_nodes_ = 0;
  int rounds_ = 0;
  bool within_bounds_ = false;
  std::vector<Edge> edges_;
};

// Simulates the two-row rotation: at t = 1 node 2i-1 faces 2i; each later
// round node 1 stays, 2 moves to the place of 3, odd nodes shift right along
// the top row, N-1 drops to the bottom-right corner and even nodes shift left.
// Requires N even and 2 <= n < N/4; throws InvalidDimensions otherwise.
RoundRobinGraph build_schedule(int N, int n);

// Same rotation with only N even and 1 <= n <= N-1 enforced. Layer formulas
// refuse graphs built this way when they fall outside the strict bounds.
RoundRobinGraph build_schedule_unchecked(int N, int n);

// Opponent of `node` in round t, from cycle arithmetic rather than by
// replaying rotations: the N-1 moving positions form a cycle, every node
// advances one step per round, and positions c, c' face each other iff
// c + c' = 0 mod (N-1) (position 0 faces node 1).
int round_robin_opponent(int N, int node, int round);

struct EdgeLayer {
  // X_{q<->q}: both endpoints in V_q.
  std::vector<std::pair<int, int>> within;
  // X_{q<->q+1}: one endpoint in V_q, the other in V_{q+1}.
  std::vector<std::pair<int, int>> to_next;

  friend bool operator==(const EdgeLayer&, const EdgeLayer&) = default;
};

// Graph-distance layers around node 1 and the matching edge layers.
struct LayerStructure {
  int num_nodes = 0;
  int rounds = 0;
  // Quotient and remainder of N/2 - 1 by n - 1 (both 0 when n = 1).
  int q_max = 0;
  int remainder = 0;
  // node_layers[q] = V_q, sorted. V_0 = {1}. Its size is depth() + 1, which
  // is q_max + 2 except when 2 * remainder > n - 1, where the tail splits into
  // one extra layer.
  std::vector<std::vector<int>> node_layers;
  // edge_layers[q] for q = 0..depth(); edge_layers[depth()].to_next is empty.
  std::vector<EdgeLayer> edge_layers;

  int depth() const { return static_cast<int>(node_layers.size()) - 1; }

  // Layer index of every node, indexed by node id (entry 0 unused).
  std::vector<int> layer_of() const;

  // |X_q| = |X_{q<->q+1}| + |X_{q+1<->q+1}|, for q = 0..depth()-1.
  int factor_size(int q) const;

  friend bool operator==(const LayerStructure&, const LayerStructure&) =
      default;
};

// Breadth-first layers of an actual graph. Throws DisconnectedGraph when a
// node cannot be reached from node 1.
LayerStructure layer_decomposition(const RoundRobinGraph& graph);

// Layers from closed-form membership rules alone: V_1 = {2x : x <= n},
// V_q = {2x+1 : x in [(q-2)(n-1)+1, (q-1)(n-1)]} u {2x : x in
// [2+(q-1)(n-1), 1+q(n-1)]} for 2 <= q <= Q, and the remaining nodes as the
// tail. When 2r > n-1 the odd nodes 2y+1 with y in [Q(n-1)+1, (Q-1)(n-1)+2r]
// sit one step further out than the rest of the tail. Edge layers come from
// round_robin_opponent. Requires N even and 2 <= n < N/4.
LayerStructure predicted_layers(int N, int n);

// Euclidean division N/2 - 1 = q (n-1) + r.
std::pair<int, int> layer_quotient(int N, int n);

void write_graph_csv(const RoundRobinGraph& graph, std::ostream& out);
nlohmann::json layers_to_json(const LayerStructure& layers);

}  // namespace lgmle

#endif  // LGMLE_RR_GRAPH_HPP_
