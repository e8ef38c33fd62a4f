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

#include "lgmle/rr_graph.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <stdexcept>
#include <string>

#include "lgmle/error.hpp"

namespace lgmle {
namespace {

void check_even_size(int N) {
  if (N % 2 != 0) {
    throw Error(ErrorCode::kInvalidDimensions, "N must be even");
  }
  if (N < 2) {
    throw Error(ErrorCode::kInvalidDimensions, "N must be at least 2");
  }
}

void check_strict_bounds(int N, int n) {
  check_even_size(N);
  if (n < 2) {
    throw Error(ErrorCode::kInvalidDimensions, "n must be >= 2");
  }
  if (4 * n >= N) {
    throw Error(ErrorCode::kInvalidDimensions,
                "n must be < N/4 (got n=" + std::to_string(n) +
                    ", N=" + std::to_string(N) + ")");
  }
}

// Position of a node on the cycle of moving seats at round 1: the seat below
// node 1 is 0, the top row continues 1..M-1, the bottom row runs back from
// M (bottom-right) to 2M-2 (second seat from the left).
int initial_cycle_index(int N, int node) {
  const int M = N / 2;
  if (node == 2) return 0;
  if (node % 2 == 1) return (node + 1) / 2 - 1;
  return 2 * M - node / 2;
}

int node_at_cycle_index(int N, int index) {
  const int M = N / 2;
  if (index == 0) return 2;
  if (index <= M - 1) return 2 * (index + 1) - 1;
  return 2 * (2 * M - index);
}

void sort_edge_layers(LayerStructure& layers) {
  for (auto& layer : layers.edge_layers) {
    std::sort(layer.within.begin(), layer.within.end());
    std::sort(layer.to_next.begin(), layer.to_next.end());
  }
}

// Adds the graph's edges to layer lists given a node -> layer map.
void assign_edges(const std::vector<std::pair<int, int>>& pairs,
                  const std::vector<int>& layer_of, LayerStructure& layers) {
  layers.edge_layers.assign(layers.node_layers.size(), EdgeLayer{});
  for (const auto& [i, j] : pairs) {
    const int a = layer_of[i];
    const int b = layer_of[j];
    if (a == b) {
      layers.edge_layers[a].within.emplace_back(i, j);
    } else if (std::abs(a - b) == 1) {
      layers.edge_layers[std::min(a, b)].to_next.emplace_back(i, j);
    } else {
      throw std::logic_error("edge {" + std::to_string(i) + "," +
                             std::to_string(j) +
                             "} joins non-adjacent layers");
    }
  }
  sort_edge_layers(layers);
}

}  // namespace

std::vector<Edge> RoundRobinGraph::round_edges(int t) const {
  std::vector<Edge> out;
  for (const Edge& e : edges_) {
    if (e.round == t) out.push_back(e);
  }
  return out;
}

RoundRobinGraph build_schedule(int N, int n) {
  check_strict_bounds(N, n);
  return build_schedule_unchecked(N, n);
}

RoundRobinGraph build_schedule_unchecked(int N, int n) {
  check_even_size(N);
  if (n < 1 || n > N - 1) {
    throw Error(ErrorCode::kInvalidDimensions, "n must lie in [1, N-1]");
  }
  const int M = N / 2;
  std::vector<int> top(M), bottom(M);
  for (int k = 0; k < M; ++k) {
    top[k] = 2 * k + 1;
    bottom[k] = 2 * k + 2;
  }

  RoundRobinGraph graph;
  graph.num_nodes_ = N;
  graph.rounds_ = n;
  graph.within_bounds_ = n >= 2 && 4 * n < N;
  graph.edges_.reserve(static_cast<std::size_t>(M) * n);
  for (int t = 1; t <= n; ++t) {
    for (int k = 0; k < M; ++k) {
      graph.edges_.push_back({std::min(top[k], bottom[k]),
                              std::max(top[k], bottom[k]), t});
    }
    // Top row shifts right behind the pinned node, the bottom row shifts
    // left, and the two corner seats hand over between rows.
    std::vector<int> next_top(M), next_bottom(M);
    next_top[0] = top[0];
    if (M > 1) next_top[1] = bottom[0];
    for (int k = 2; k < M; ++k) next_top[k] = top[k - 1];
    for (int k = 0; k + 1 < M; ++k) next_bottom[k] = bottom[k + 1];
    next_bottom[M - 1] = M > 1 ? top[M - 1] : bottom[0];
    top = std::move(next_top);
    bottom = std::move(next_bottom);
  }
  return graph;
}

int round_robin_opponent(int N, int node, int round) {
  check_even_size(N);
  if (node < 1 || node > N || round < 1) {
    throw Error(ErrorCode::kInvalidDimensions, "node or round out of range");
  }
  const int cycle = N - 1;
  const int shift = (round - 1) % cycle;
  if (node == 1) {
    // Node 1 faces whoever occupies seat 0.
    return node_at_cycle_index(N, ((-shift) % cycle + cycle) % cycle);
  }
  const int seat = (initial_cycle_index(N, node) + shift) % cycle;
  if (seat == 0) return 1;
  const int facing_seat = cycle - seat;
  return node_at_cycle_index(N, ((facing_seat - shift) % cycle + cycle) % cycle);
}

std::pair<int, int> layer_quotient(int N, int n) {
  if (n < 2) {
    throw Error(ErrorCode::kInvalidDimensions, "n must be >= 2");
  }
  const int half = N / 2 - 1;
  return {half / (n - 1), half % (n - 1)};
}

std::vector<int> LayerStructure::layer_of() const {
  std::vector<int> out(num_nodes + 1, -1);
  for (std::size_t q = 0; q < node_layers.size(); ++q) {
    for (int v : node_layers[q]) out[v] = static_cast<int>(q);
  }
  return out;
}

int LayerStructure::factor_size(int q) const {
  return static_cast<int>(edge_layers.at(q).to_next.size() +
                          edge_layers.at(q + 1).within.size());
}

LayerStructure layer_decomposition(const RoundRobinGraph& graph) {
  const int N = graph.num_nodes();
  std::vector<std::vector<int>> adjacency(N + 1);
  for (const Edge& e : graph.edges()) {
    adjacency[e.i].push_back(e.j);
    adjacency[e.j].push_back(e.i);
  }

  std::vector<int> distance(N + 1, -1);
  std::deque<int> frontier{1};
  distance[1] = 0;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    for (int v : adjacency[u]) {
      if (distance[v] < 0) {
        distance[v] = distance[u] + 1;
        frontier.push_back(v);
      }
    }
  }

  LayerStructure layers;
  layers.num_nodes = N;
  layers.rounds = graph.rounds();
  const int depth = *std::max_element(distance.begin() + 1, distance.end());
  layers.node_layers.assign(depth + 1, {});
  for (int v = 1; v <= N; ++v) {
    if (distance[v] < 0) {
      throw Error(ErrorCode::kDisconnectedGraph,
                  "node " + std::to_string(v) + " unreachable from node 1");
    }
    layers.node_layers[distance[v]].push_back(v);
  }
  if (graph.rounds() >= 2) {
    std::tie(layers.q_max, layers.remainder) =
        layer_quotient(N, graph.rounds());
  }

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(graph.edges().size());
  for (const Edge& e : graph.edges()) pairs.emplace_back(e.i, e.j);
  assign_edges(pairs, distance, layers);
  return layers;
}

LayerStructure predicted_layers(int N, int n) {
  check_strict_bounds(N, n);
  const auto [Q, r] = layer_quotient(N, n);
  const int w = n - 1;

  LayerStructure layers;
  layers.num_nodes = N;
  layers.rounds = n;
  layers.q_max = Q;
  layers.remainder = r;

  auto odd_range = [](int lo, int hi, std::vector<int>& out) {
    for (int x = lo; x <= hi; ++x) out.push_back(2 * x + 1);
  };
  auto even_range = [](int lo, int hi, std::vector<int>& out) {
    for (int x = lo; x <= hi; ++x) out.push_back(2 * x);
  };

  layers.node_layers.push_back({1});
  std::vector<int> first;
  even_range(1, n, first);
  layers.node_layers.push_back(first);
  for (int q = 2; q <= Q; ++q) {
    std::vector<int> layer;
    odd_range((q - 2) * w + 1, (q - 1) * w, layer);
    even_range(2 + (q - 1) * w, 1 + q * w, layer);
    layers.node_layers.push_back(layer);
  }

  std::vector<int> tail;
  odd_range((Q - 1) * w + 1, Q * w + r, tail);
  even_range(2 + Q * w, 1 + r + Q * w, tail);
  std::vector<int> outer;
  odd_range(Q * w + 1, (Q - 1) * w + 2 * r, outer);
  std::erase_if(tail, [&](int v) {
    return std::find(outer.begin(), outer.end(), v) != outer.end();
  });
  layers.node_layers.push_back(tail);
  if (!outer.empty()) layers.node_layers.push_back(outer);
  for (auto& layer : layers.node_layers) std::sort(layer.begin(), layer.end());

  const std::vector<int> layer_of = layers.layer_of();
  if (std::count(layer_of.begin() + 1, layer_of.end(), -1) != 0) {
    throw std::logic_error("closed-form layers do not cover every node");
  }

  std::vector<std::pair<int, int>> pairs;
  for (int t = 1; t <= n; ++t) {
    for (int i = 1; i <= N; ++i) {
      const int j = round_robin_opponent(N, i, t);
      if (i < j) pairs.emplace_back(i, j);
    }
  }
  assign_edges(pairs, layer_of, layers);
  return layers;
}

void write_graph_csv(const RoundRobinGraph& graph, std::ostream& out) {
  out << "i,j,round\n";
  for (const Edge& e : graph.edges()) {
    out << e.i << ',' << e.j << ',' << e.round << '\n';
  }
}

nlohmann::json layers_to_json(const LayerStructure& layers) {
  nlohmann::json edge_layers = nlohmann::json::array();
  for (std::size_t q = 0; q < layers.edge_layers.size(); ++q) {
    edge_layers.push_back({{"q", q},
                           {"within", layers.edge_layers[q].within},
                           {"to_next", layers.edge_layers[q].to_next}});
  }
  return {{"N", layers.num_nodes},
          {"n", layers.rounds},
          {"q_max", layers.q_max},
          {"remainder", layers.remainder},
          {"depth", layers.depth()},
          {"node_layers", layers.node_layers},
          {"edge_layers", edge_layers}};
}

}  // namespace lgmle
