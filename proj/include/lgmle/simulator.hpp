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

#ifndef LGMLE_SIMULATOR_HPP_
#define LGMLE_SIMULATOR_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "lgmle/distribution.hpp"
#include "lgmle/kernels.hpp"
#include "lgmle/rr_graph.hpp"

namespace lgmle {

// Observed outcomes on a round-robin graph. outcomes[e] belongs to
// graph.edges()[e]; true_weights[i - 1] is the latent weight of node i.
struct Dataset {
  RoundRobinGraph graph;
  LayerStructure layers;
  std::vector<int> outcomes;
  std::optional<std::vector<double>> true_weights;
  std::uint64_t seed = 0;

  // Outcome of edge {i, j}; throws InvalidDimensions if it is not an edge.
  int outcome(int i, int j) const;

  // Copy without the latent weights.
  Dataset blind() const;
};

// N i.i.d. draws from pi, node by node from the weights stream of `seed`.
std::vector<double> sample_weights(const DiscreteDistribution& pi, int N,
                                   std::uint64_t seed);

// One independent draw from k(., V_i, V_j) per edge, in edge order, from the
// outcomes stream of `seed`. The weights are retained in the dataset.
Dataset sample_outcomes(const RoundRobinGraph& graph, const Kernel& kernel,
                        std::span<const double> weights, std::uint64_t seed);

Dataset simulate(const DiscreteDistribution& pi_star, const Kernel& kernel,
                 int N, int n, std::uint64_t seed);

// {"N", "n", "seed", "outcomes": [[i, j, x], ...], "true_weights"?}.
nlohmann::json dataset_to_json(const Dataset& data);
// Rebuilds the graph from (N, n); the outcome list must cover it exactly.
Dataset dataset_from_json(const nlohmann::json& j);

// Header `i,j,round,x`.
void write_outcomes_csv(const Dataset& data, std::ostream& out);

}  // namespace lgmle

#endif  // LGMLE_SIMULATOR_HPP_
