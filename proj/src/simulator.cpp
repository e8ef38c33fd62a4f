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

#include "lgmle/simulator.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "lgmle/error.hpp"
#include "lgmle/rng.hpp"

namespace lgmle {

int Dataset::outcome(int i, int j) const {
  if (i > j) std::swap(i, j);
  const auto& edges = graph.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].i == i && edges[e].j == j) return outcomes[e];
  }
  throw Error(ErrorCode::kInvalidDimensions,
              "{" + std::to_string(i) + "," + std::to_string(j) +
                  "} is not an edge");
}

Dataset Dataset::blind() const {
  Dataset out = *this;
  out.true_weights.reset();
  return out;
}

std::vector<double> sample_weights(const DiscreteDistribution& pi, int N,
                                   std::uint64_t seed) {
  if (N < 1) throw Error(ErrorCode::kInvalidDimensions, "N must be >= 1");
  Rng rng(seed, Stream::kWeights);
  const auto& probs = pi.probs();
  const std::span<const double> weights(probs.data(), probs.size());
  std::vector<double> out(N);
  for (double& v : out) v = pi.support()(rng.categorical(weights));
  return out;
}

Dataset sample_outcomes(const RoundRobinGraph& graph, const Kernel& kernel,
                        std::span<const double> weights, std::uint64_t seed) {
  if (static_cast<int>(weights.size()) != graph.num_nodes()) {
    throw Error(ErrorCode::kInvalidDimensions,
                "need one weight per node (got " +
                    std::to_string(weights.size()) + ", N = " +
                    std::to_string(graph.num_nodes()) + ")");
  }
  Rng rng(seed, Stream::kOutcomes);
  Dataset data;
  data.graph = graph;
  data.layers = layer_decomposition(graph);
  data.seed = seed;
  data.true_weights.emplace(weights.begin(), weights.end());
  data.outcomes.reserve(graph.edges().size());
  std::vector<double> probs(kernel.num_outcomes());
  for (const Edge& e : graph.edges()) {
    for (int o = 0; o < kernel.num_outcomes(); ++o) {
      probs[o] = kernel_prob(kernel, kernel.outcomes()[o], weights[e.i - 1],
                             weights[e.j - 1]);
    }
    data.outcomes.push_back(kernel.outcomes()[rng.categorical(probs)]);
  }
  return data;
}

Dataset simulate(const DiscreteDistribution& pi_star, const Kernel& kernel,
                 int N, int n, std::uint64_t seed) {
  const RoundRobinGraph graph = build_schedule(N, n);
  const std::vector<double> weights = sample_weights(pi_star, N, seed);
  return sample_outcomes(graph, kernel, weights, seed);
}

nlohmann::json dataset_to_json(const Dataset& data) {
  nlohmann::json outcomes = nlohmann::json::array();
  const auto& edges = data.graph.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    outcomes.push_back({edges[e].i, edges[e].j, data.outcomes[e]});
  }
  nlohmann::json out = {{"N", data.graph.num_nodes()},
                        {"n", data.graph.rounds()},
                        {"seed", data.seed},
                        {"outcomes", outcomes}};
  if (data.true_weights) out["true_weights"] = *data.true_weights;
  return out;
}

Dataset dataset_from_json(const nlohmann::json& j) {
  Dataset data;
  const int N = j.at("N").get<int>();
  const int n = j.at("n").get<int>();
  data.graph = build_schedule_unchecked(N, n);
  data.layers = layer_decomposition(data.graph);
  data.seed = j.value("seed", std::uint64_t{0});
  const auto& edges = data.graph.edges();
  const auto& listed = j.at("outcomes");
  if (listed.size() != edges.size()) {
    throw Error(ErrorCode::kInvalidDimensions,
                "dataset must list one outcome per edge");
  }
  data.outcomes.resize(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto triple = listed[e].get<std::vector<int>>();
    if (triple.size() != 3 || triple[0] != edges[e].i ||
        triple[1] != edges[e].j) {
      throw Error(ErrorCode::kInvalidDimensions,
                  "dataset outcomes must follow the schedule's edge order");
    }
    data.outcomes[e] = triple[2];
  }
  if (j.contains("true_weights")) {
    data.true_weights = j.at("true_weights").get<std::vector<double>>();
  }
  return data;
}

void write_outcomes_csv(const Dataset& data, std::ostream& out) {
  out << "i,j,round,x\n";
  const auto& edges = data.graph.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out << edges[e].i << ',' << edges[e].j << ',' << edges[e].round << ','
        << data.outcomes[e] << '\n';
  }
}

}  // namespace lgmle
