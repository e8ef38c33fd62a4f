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

#ifndef LGMLE_ESTIMATOR_HPP_
#define LGMLE_ESTIMATOR_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "lgmle/distribution.hpp"
#include "lgmle/kernels.hpp"
#include "lgmle/likelihood.hpp"
#include "lgmle/simulator.hpp"

namespace lgmle {

enum class FitMode { kEm, kGrid };
enum class InitMode { kUniform, kRandom, kExplicit };

// Weights below this are raised to it after every M-step.
inline constexpr double kWeightFloor = 1e-12;

struct FitConfig {
  // EM: the fixed grid whose weights are estimated.
  Eigen::VectorXd support;
  // Restart 0 starts from the uniform law (kUniform) or explicit_inits[0]
  // (kExplicit); every other restart, and all of them under kRandom, starts
  // from a flat Dirichlet draw of the init stream.
  InitMode init = InitMode::kUniform;
  std::vector<Eigen::VectorXd> explicit_inits;
  int max_iters = 500;
  // Stop once (ll_new - ll_old) / |ll_old| < tol.
  double tol = 1e-10;
  int restarts = 1;
  FitMode mode = FitMode::kEm;
  // Grid mode: evaluated in order, ties go to the lowest index.
  std::vector<DiscreteDistribution> candidates;
  std::uint64_t seed = 0;
  int threads = 1;

  // Throws InvalidConfig when a field is out of range.
  void validate() const;
};

struct RestartOutcome {
  Eigen::VectorXd init;
  Eigen::VectorXd probs;
  double log_lik = 0.0;
  std::vector<double> trajectory;
  bool converged = false;
};

struct FitResult {
  explicit FitResult(DiscreteDistribution pi) : pi_hat(std::move(pi)) {}

  DiscreteDistribution pi_hat;
  double final_log_lik = 0.0;
  // Log-likelihood before the first step and after each step (EM), or the
  // winning value alone (grid).
  std::vector<double> trajectory;
  bool converged = false;
  // Winning restart (EM) or candidate (grid).
  int restart_index = 0;
  std::vector<RestartOutcome> restarts;
  std::vector<double> candidate_log_liks;
};

// One EM update: pi'(a) = mean over nodes of P_pi(V_i = support[a] | X),
// floored at kWeightFloor and renormalized.
DiscreteDistribution em_step(const Dataset& data, const DiscreteDistribution& pi,
                             const Kernel& kernel);

// Same update against a prebuilt chain.
Eigen::VectorXd em_update(const LayerChain<double>& chain,
                          const Eigen::VectorXd& probs);

FitResult fit_mle(const Dataset& data, const Kernel& kernel,
                  const FitConfig& config);

struct ProfilePoint {
  DiscreteDistribution candidate;
  // log-likelihood / Q_max.
  double normalized_log_lik = 0.0;
};

std::vector<ProfilePoint> profile_likelihood(
    const Dataset& data, const Kernel& kernel,
    const std::vector<DiscreteDistribution>& candidates, int threads = 1);

// Flat Dirichlet(1, ..., 1) draw on s points.
Eigen::VectorXd dirichlet_draw(Eigen::Index s, std::uint64_t seed,
                               std::uint64_t substream);

nlohmann::json distribution_to_json(const DiscreteDistribution& pi);
DiscreteDistribution distribution_from_json(const nlohmann::json& j);
nlohmann::json fit_result_to_json(const FitResult& result);

}  // namespace lgmle

#endif  // LGMLE_ESTIMATOR_HPP_
