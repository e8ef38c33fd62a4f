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

#ifndef LGMLE_LIKELIHOOD_HPP_
#define LGMLE_LIKELIHOOD_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "lgmle/distribution.hpp"
#include "lgmle/kernels.hpp"
#include "lgmle/simulator.hpp"

namespace lgmle {

// Factor q of the chain as exp(log K_q - log_shift), where
// K_q(u, v) = prod over X_q of k(x, V_i, V_j) for block states u of V_q and
// v of V_{q+1}.
template <typename Scalar>
struct ScaledFactor {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> kernel;
  Scalar log_shift = 0;
};

// Normalized backward messages: exp(log_messages[q]) sums to one over the
// block states of V_q, and log_norms[q] is the log of the removed mass.
struct BackwardMessages {
  std::vector<Eigen::VectorXd> log_messages;
  std::vector<double> log_norms;
};

struct ContractionStep {
  // Block reached by this step (the laws now live on V_layer).
  int layer = 0;
  double tv = 0.0;
  double previous_tv = 0.0;
  // nu_k = epsilon^{|X_k|} for the factor crossed.
  double nu = 0.0;
  // Dobrushin coefficient of the realized backward kernel (NaN if skipped).
  double dobrushin = 0.0;
  // (1 - nu_k) * previous_tv.
  double step_bound = 0.0;
  // Initial TV times the product of (1 - nu_i) over the steps so far.
  double cumulative_bound = 0.0;
};

struct ContractionProfile {
  int q = 0;
  int m = 0;
  double epsilon = 0.0;
  std::vector<ContractionStep> steps;
};

// Exact variable elimination on the chain of latent blocks
// V_0 - V_1 - ... - V_D, with factor X_q linking V_q and V_{q+1}. Block
// states enumerate support^{|V_q|} in row-major order over the sorted node
// list (first node is the most significant digit). Transfer matrices depend
// only on the data and the support grid, so one chain serves every prior on
// that grid; they are cached when their total size fits `cache_entries`.
template <typename Scalar>
class LayerChain {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  static constexpr std::size_t kDefaultCacheEntries = std::size_t{1} << 22;

  LayerChain(const Dataset& data, const Kernel& kernel,
             const Eigen::VectorXd& support,
             std::size_t cache_entries = kDefaultCacheEntries);

  int num_nodes() const { return static_cast<int>(node_block_.size()) - 1; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int num_factors() const { return num_blocks() - 1; }
  int block_size(int q) const {
    return static_cast<int>(blocks_.at(q).size());
  }
  Eigen::Index block_states(int q) const;
  // |X_q|.
  int factor_size(int q) const;
  const Eigen::VectorXd& support() const { return support_; }
  double epsilon() const { return epsilon_; }
  const LayerStructure& layers() const { return layers_; }

  ScaledFactor<Scalar> factor(int q) const;

  // Law of the block V_q under i.i.d. `probs`.
  Vector block_prior(const Vector& probs, int q) const;

  Scalar log_likelihood(const Vector& probs) const;

  // log P(X_a, ..., X_b) with V_a drawn from the prior and earlier data
  // ignored. Returns 0 when a > b.
  Scalar log_prob_range(const Vector& probs, int a, int b) const;

  // Log normalizer of each forward step, q = 0..D-1; their sum is the
  // log-likelihood.
  std::vector<Scalar> layer_log_normalizers(const Vector& probs) const;

  BackwardMessages backward_messages(const Vector& probs) const;

  // Row i - 1 is P(V_i = support[a] | X) over a.
  Matrix node_marginals(const Vector& probs) const;

  // Propagates `mu1` and `mu2` (laws on V_{m+1}) down to V_q through the
  // backward kernels of P(V | X_{q:m}) and records the TV distance per step.
  ContractionProfile contraction(const Vector& probs, int q, int m,
                                 const Vector& mu1, const Vector& mu2) const;

 private:
  ScaledFactor<Scalar> compute_factor(int q) const;
  const ScaledFactor<Scalar>& fetch(int q, ScaledFactor<Scalar>& scratch) const;
  // Digit of every state of block q at `position`.
  std::vector<int> digits(int q, int position) const;

  LayerStructure layers_;
  Eigen::VectorXd support_;
  std::vector<Eigen::MatrixXd> log_table_;
  double epsilon_ = 0.0;
  std::vector<std::vector<int>> blocks_;
  // Block index and position inside that block, per node id.
  std::vector<int> node_block_;
  std::vector<int> node_position_;
  // Edges (i, j) of each factor and the index of their outcome.
  std::vector<std::vector<std::pair<int, int>>> factor_edges_;
  std::vector<std::vector<int>> factor_outcomes_;
  std::optional<std::vector<ScaledFactor<Scalar>>> cache_;
};

extern template class LayerChain<double>;
extern template class LayerChain<long double>;

// Exact log P_pi(X) by forward elimination over the layers. The kernel is
// evaluated on pi's support grid. Throws H1Violated if the kernel vanishes
// there and SupportMismatch if a custom table does not cover it.
double log_likelihood(const Dataset& data, const DiscreteDistribution& pi,
                      const Kernel& kernel);

// Direct sum over all s^N weight assignments. Throws TooLargeForBruteForce
// when s^N > 1e6.
double brute_force_log_likelihood(const Dataset& data,
                                  const DiscreteDistribution& pi,
                                  const Kernel& kernel);

// log P_pi(X_q | X_{q+1}, ..., X_m). Requires 2 <= q <= m <= Q_max - 1,
// otherwise LayerOutOfRange.
double conditional_log_prob(const Dataset& data, const DiscreteDistribution& pi,
                            const Kernel& kernel, int q, int m);

// Posterior law of each node weight, one row per node (row i - 1 for node i).
Eigen::MatrixXd posterior_node_marginals(const Dataset& data,
                                         const DiscreteDistribution& pi,
                                         const Kernel& kernel);

BackwardMessages backward_messages(const Dataset& data,
                                   const DiscreteDistribution& pi,
                                   const Kernel& kernel);

// Two point masses on V_{m+1} (all weights at the lowest support point vs all
// at the highest) pushed down to V_q; q and m as in conditional_log_prob.
ContractionProfile backward_contraction_profile(const Dataset& data,
                                                const DiscreteDistribution& pi,
                                                const Kernel& kernel, int q,
                                                int m);

std::vector<double> layer_log_normalizers(const Dataset& data,
                                          const DiscreteDistribution& pi,
                                          const Kernel& kernel);

// Header `layer,log_norm`.
void write_log_normalizers_csv(const std::vector<double>& log_norms,
                               std::ostream& out);

// Throws LayerOutOfRange unless 2 <= q <= m <= Q_max - 1.
void check_conditional_range(const LayerStructure& layers, int q, int m);

}  // namespace lgmle

#endif  // LGMLE_LIKELIHOOD_HPP_
