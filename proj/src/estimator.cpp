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

#include "lgmle/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lgmle/error.hpp"
#include "lgmle/parallel.hpp"
#include "lgmle/rng.hpp"

namespace lgmle {
namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd from_std(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd floor_weights(Eigen::VectorXd probs) {
  probs = probs.cwiseMax(kWeightFloor);
  return probs / probs.sum();
}

RestartOutcome run_em(const LayerChain<double>& chain, Eigen::VectorXd init,
                      const FitConfig& config) {
  RestartOutcome out;
  out.init = init;
  Eigen::VectorXd probs = std::move(init);
  double ll = chain.log_likelihood(probs);
  out.trajectory.push_back(ll);
  for (int it = 0; it < config.max_iters; ++it) {
    Eigen::VectorXd next = em_update(chain, probs);
    const double next_ll = chain.log_likelihood(next);
    out.trajectory.push_back(next_ll);
    const double gain = (next_ll - ll) / std::max(std::abs(ll), 1e-300);
    probs = std::move(next);
    ll = next_ll;
    if (gain < config.tol) {
      out.converged = true;
      break;
    }
  }
  out.probs = std::move(probs);
  out.log_lik = ll;
  return out;
}

int best_index(const std::vector<double>& values) {
  int best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = static_cast<int>(k);
  }
  return best;
}

}  // namespace

void FitConfig::validate() const {
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidConfig, "tol must be > 0");
  if (max_iters < 1) {
    throw Error(ErrorCode::kInvalidConfig, "max_iters must be >= 1");
  }
  if (restarts < 1) {
    throw Error(ErrorCode::kInvalidConfig, "restarts must be >= 1");
  }
  if (mode == FitMode::kEm) {
    DiscreteDistribution::uniform(support);
    if (init == InitMode::kExplicit) {
      if (explicit_inits.empty()) {
        throw Error(ErrorCode::kInvalidConfig,
                    "explicit init needs at least one weight vector");
      }
      for (const auto& w : explicit_inits) {
        DiscreteDistribution(support, w);
      }
    }
  }
}

Eigen::VectorXd em_update(const LayerChain<double>& chain,
                          const Eigen::VectorXd& probs) {
  const Eigen::MatrixXd marginals = chain.node_marginals(probs);
  return floor_weights(marginals.colwise().mean().transpose());
}

DiscreteDistribution em_step(const Dataset& data, const DiscreteDistribution& pi,
                             const Kernel& kernel) {
  const LayerChain<double> chain(data, kernel, pi.support());
  return DiscreteDistribution(pi.support(), em_update(chain, pi.probs()));
}

Eigen::VectorXd dirichlet_draw(Eigen::Index s, std::uint64_t seed,
                               std::uint64_t substream) {
  Rng rng(seed, Stream::kInit, substream);
  Eigen::VectorXd out(s);
  for (Eigen::Index a = 0; a < s; ++a) out(a) = rng.exponential();
  return floor_weights(out / out.sum());
}

FitResult fit_mle(const Dataset& data, const Kernel& kernel,
                  const FitConfig& config) {
  config.validate();
  if (config.mode == FitMode::kGrid) {
    if (config.candidates.empty()) {
      throw Error(ErrorCode::kNoCandidates, "grid mode needs candidates");
    }
    std::vector<double> values(config.candidates.size());
    parallel_for(values.size(), config.threads, [&](std::size_t k) {
      values[k] = log_likelihood(data, config.candidates[k], kernel);
    });
    const int best = best_index(values);
    FitResult result(config.candidates[best]);
    result.final_log_lik = values[best];
    result.trajectory = {values[best]};
    result.converged = true;
    result.restart_index = best;
    result.candidate_log_liks = std::move(values);
    return result;
  }

  const LayerChain<double> chain(data, kernel, config.support);
  const Eigen::Index s = config.support.size();
  const int runs = config.init == InitMode::kExplicit
                       ? std::max<int>(config.restarts,
                                       static_cast<int>(config.explicit_inits.size()))
                       : config.restarts;
  std::vector<Eigen::VectorXd> inits(runs);
  for (int r = 0; r < runs; ++r) {
    if (config.init == InitMode::kExplicit &&
        r < static_cast<int>(config.explicit_inits.size())) {
      inits[r] = config.explicit_inits[r];
    } else if (config.init == InitMode::kUniform && r == 0) {
      inits[r] = Eigen::VectorXd::Constant(s, 1.0 / static_cast<double>(s));
    } else {
      inits[r] = dirichlet_draw(s, config.seed, static_cast<std::uint64_t>(r));
    }
  }

  std::vector<RestartOutcome> outcomes(runs);
  parallel_for(outcomes.size(), config.threads, [&](std::size_t r) {
    outcomes[r] = run_em(chain, inits[r], config);
  });
  std::vector<double> finals;
  for (const auto& o : outcomes) finals.push_back(o.log_lik);
  const int best = best_index(finals);

  FitResult result(DiscreteDistribution(config.support, outcomes[best].probs));
  result.final_log_lik = outcomes[best].log_lik;
  result.trajectory = outcomes[best].trajectory;
  result.converged = outcomes[best].converged;
  result.restart_index = best;
  result.restarts = std::move(outcomes);
  return result;
}

std::vector<ProfilePoint> profile_likelihood(
    const Dataset& data, const Kernel& kernel,
    const std::vector<DiscreteDistribution>& candidates, int threads) {
  const int q_max = data.layers.q_max;
  if (q_max < 1) {
    throw Error(ErrorCode::kLayerOutOfRange, "profile needs Q_max >= 1");
  }
  std::vector<double> values(candidates.size());
  parallel_for(values.size(), threads, [&](std::size_t k) {
    values[k] = log_likelihood(data, candidates[k], kernel) / q_max;
  });
  std::vector<ProfilePoint> out;
  out.reserve(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    out.push_back({candidates[k], values[k]});
  }
  return out;
}

nlohmann::json distribution_to_json(const DiscreteDistribution& pi) {
  return {{"support", to_std(pi.support())}, {"probs", to_std(pi.probs())}};
}

DiscreteDistribution distribution_from_json(const nlohmann::json& j) {
  return DiscreteDistribution(
      from_std(j.at("support").get<std::vector<double>>()),
      from_std(j.at("probs").get<std::vector<double>>()));
}

nlohmann::json fit_result_to_json(const FitResult& result) {
  nlohmann::json restarts = nlohmann::json::array();
  for (const auto& r : result.restarts) {
    restarts.push_back({{"init", to_std(r.init)},
                        {"probs", to_std(r.probs)},
                        {"log_lik", r.log_lik},
                        {"iterations", r.trajectory.size() - 1},
                        {"converged", r.converged}});
  }
  nlohmann::json out = {{"pi_hat", distribution_to_json(result.pi_hat)},
                        {"final_log_lik", result.final_log_lik},
                        {"trajectory", result.trajectory},
                        {"converged", result.converged},
                        {"restart_index", result.restart_index},
                        {"restarts", restarts}};
  if (!result.candidate_log_liks.empty()) {
    out["candidate_log_liks"] = result.candidate_log_liks;
  }
  return out;
}

}  // namespace lgmle
