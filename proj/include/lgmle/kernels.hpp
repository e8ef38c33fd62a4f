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

#ifndef LGMLE_KERNELS_HPP_
#define LGMLE_KERNELS_HPP_

#include <Eigen/Dense>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace lgmle {

enum class KernelVariant {
  kBradleyTerry,
  kHomeAdvantage,
  kTies,
  kDegreeModel,
  kCustomTable,
};

const char* kernel_variant_name(KernelVariant variant);

// Conditional outcome law k(x, v, w) of an edge {i, j}, i < j, given the
// endpoint weights v = V_i and w = V_j. Immutable after construction.
//
//   BradleyTerry    x in {0, 1}:     k(1) = v / (v + w)
//   HomeAdvantage   x in {0, 1}:     k(1) = theta v / (theta v + w),
//                                    node i (smaller id) is at home
//   Ties            x in {-1, 0, 1}: k(1) = v / (v + theta w),
//                                    k(-1) = w / (w + theta v), k(0) = rest
//   DegreeModel     x in {0, 1}:     k(1) = v w / (1 + v w)
//   CustomTable     table[o](a, b) = k(outcomes[o], support[a], support[b])
class Kernel {
 public:
  static Kernel bradley_terry();
  static Kernel home_advantage(double theta);
  static Kernel ties(double theta);
  static Kernel degree_model();
  // `table[o]` is an s x s matrix over `support`; columns of the stacked
  // table must sum to one over o.
  static Kernel custom_table(std::vector<int> outcomes, Eigen::VectorXd support,
                             std::vector<Eigen::MatrixXd> table);
  // k == 1 / |outcomes| everywhere on `support`.
  static Kernel uniform(std::vector<int> outcomes, Eigen::VectorXd support);

  KernelVariant variant() const { return variant_; }
  double theta() const { return theta_; }
  const std::vector<int>& outcomes() const { return outcomes_; }
  int num_outcomes() const { return static_cast<int>(outcomes_.size()); }
  // Position of x in outcomes(), or -1.
  int outcome_index(int x) const;

  // Grid on which a CustomTable is defined (empty for parametric variants).
  const Eigen::VectorXd& table_support() const { return table_support_; }
  const std::vector<Eigen::MatrixXd>& table() const { return table_; }

 private:
  Kernel() = default;

  KernelVariant variant_ = KernelVariant::kBradleyTerry;
  double theta_ = 1.0;
  std::vector<int> outcomes_;
  Eigen::VectorXd table_support_;
  std::vector<Eigen::MatrixXd> table_;
};

// k(x, v, w). Throws OutcomeNotInSpace, NonPositiveWeight, or SupportMismatch
// when a CustomTable is queried off its grid.
double kernel_prob(const Kernel& kernel, int x, double v, double w);

struct EpsilonCertificate {
  double epsilon = 0.0;
  int x = 0;
  double v = 0.0;
  double w = 0.0;
};

// Exact minimum of k over outcomes x support x support. Throws H1Violated
// when it is not positive.
EpsilonCertificate epsilon_floor(const Kernel& kernel,
                                 const Eigen::VectorXd& support);

// log k on a support grid: entry o is the s x s matrix
// log k(outcomes[o], support[a], support[b]). Throws H1Violated on zeros.
std::vector<Eigen::MatrixXd> log_table(const Kernel& kernel,
                                       const Eigen::VectorXd& support);

// Nodes of one layer and the weights currently assigned to them.
struct WeightBlock {
  std::vector<int> nodes;
  std::vector<double> weights;
};

// Sum of log k(x_e, V_i, V_j) over the edges of one factor. Endpoints are
// looked up in `lower` and `upper`; x_block[e] is the outcome of edges[e].
double block_log_kernel(const Kernel& kernel,
                        std::span<const std::pair<int, int>> edges,
                        std::span<const int> x_block, const WeightBlock& lower,
                        const WeightBlock& upper);

// {"variant": "bradley_terry" | "home_advantage" | "ties" | "degree_model" |
//  "custom_table" | "uniform", "theta": ..., "outcomes": [...],
//  "support": [...], "table": [[[...]]] or "table_path": "..."}.
// `default_support` is used by table variants that omit "support".
Kernel kernel_from_json(const nlohmann::json& spec,
                        const Eigen::VectorXd& default_support);
nlohmann::json kernel_to_json(const Kernel& kernel);

}  // namespace lgmle

#endif  // LGMLE_KERNELS_HPP_
