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

#ifndef LGMLE_TOOLS_CONFIG_HPP_
#define LGMLE_TOOLS_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lgmle/distribution.hpp"
#include "lgmle/estimator.hpp"
#include "lgmle/kernels.hpp"

namespace lgmle::cli {

// Values given on the command line; each one overrides the config file.
struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<int> N;
  std::optional<int> n;
};

// Built-in defaults, then the config file, then the overrides. The result is
// what every output embeds under "config".
nlohmann::json resolve_config(const Overrides& overrides);

// Typed views of a resolved config. Laws are given as probability vectors on
// model.support.
struct ExperimentConfig {
  explicit ExperimentConfig(const nlohmann::json& resolved);

  nlohmann::json resolved;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
  Eigen::VectorXd support;
  Kernel kernel;
  DiscreteDistribution pi_star;
  DiscreteDistribution pi;
  int N = 0;
  int n = 0;
  std::optional<std::string> data_path;
  FitConfig fit;
  std::vector<DiscreteDistribution> risk_candidates;
};

// Reads a JSON file; throws Io or InvalidConfig.
nlohmann::json read_json_file(const std::string& path);

}  // namespace lgmle::cli

#endif  // LGMLE_TOOLS_CONFIG_HPP_
