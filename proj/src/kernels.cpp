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

#include "lgmle/kernels.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "lgmle/distribution.hpp"
#include "lgmle/error.hpp"

namespace lgmle {
namespace {

constexpr double kNormalizationTolerance = 1e-12;

void check_weight(double v) {
  if (!(v > 0.0)) {
    throw Error(ErrorCode::kNonPositiveWeight,
                "kernel weights must be > 0 (got " + std::to_string(v) + ")");
  }
}

Eigen::Index table_index(const Kernel& kernel, double v) {
  const Eigen::Index a =
      DiscreteDistribution::index_in(kernel.table_support(), v);
  if (a < 0) {
    throw Error(ErrorCode::kSupportMismatch,
                "weight " + std::to_string(v) +
                    " is not on the custom table's support grid");
  }
  return a;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& values) {
  const auto raw = values.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(raw.data(),
                                           static_cast<Eigen::Index>(raw.size()));
}

std::vector<Eigen::MatrixXd> table_from_json(const nlohmann::json& values) {
  std::vector<Eigen::MatrixXd> table;
  for (const auto& slice : values) {
    const auto rows = slice.get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
      if (static_cast<Eigen::Index>(rows[a].size()) != m.cols()) {
        throw Error(ErrorCode::kInvalidConfig, "ragged custom kernel table");
      }
      for (std::size_t b = 0; b < rows[a].size(); ++b) m(a, b) = rows[a][b];
    }
    table.push_back(std::move(m));
  }
  return table;
}

}  // namespace

const char* kernel_variant_name(KernelVariant variant) {
  switch (variant) {
    case KernelVariant::kBradleyTerry: return "bradley_terry";
    case KernelVariant::kHomeAdvantage: return "home_advantage";
    case KernelVariant::kTies: return "ties";
    case KernelVariant::kDegreeModel: return "degree_model";
    case KernelVariant::kCustomTable: return "custom_table";
  }
  return "unknown";
}

Kernel Kernel::bradley_terry() {
  Kernel k;
  k.variant_ = KernelVariant::kBradleyTerry;
  k.outcomes_ = {0, 1};
  return k;
}

Kernel Kernel::home_advantage(double theta) {
  if (!(theta > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "home advantage theta must be > 0");
  }
  Kernel k;
  k.variant_ = KernelVariant::kHomeAdvantage;
  k.theta_ = theta;
  k.outcomes_ = {0, 1};
  return k;
}

Kernel Kernel::ties(double theta) {
  if (!(theta > 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "ties theta must be > 1");
  }
  Kernel k;
  k.variant_ = KernelVariant::kTies;
  k.theta_ = theta;
  k.outcomes_ = {-1, 0, 1};
  return k;
}

Kernel Kernel::degree_model() {
  Kernel k;
  k.variant_ = KernelVariant::kDegreeModel;
  k.outcomes_ = {0, 1};
  return k;
}

Kernel Kernel::custom_table(std::vector<int> outcomes, Eigen::VectorXd support,
                            std::vector<Eigen::MatrixXd> table) {
  if (outcomes.empty() || outcomes.size() != table.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                "custom table needs one s x s slice per outcome");
  }
  for (std::size_t o = 1; o < outcomes.size(); ++o) {
    if (outcomes[o] <= outcomes[o - 1]) {
      throw Error(ErrorCode::kInvalidConfig,
                  "outcomes must be strictly increasing");
    }
  }
  // Reuses the distribution checks on the grid itself.
  DiscreteDistribution::uniform(support);
  const Eigen::Index s = support.size();
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(s, s);
  for (const auto& slice : table) {
    if (slice.rows() != s || slice.cols() != s) {
      throw Error(ErrorCode::kInvalidConfig,
                  "custom table slices must be s x s");
    }
    if ((slice.array() < 0.0).any() || (slice.array() > 1.0).any()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "custom table entries must lie in [0, 1]");
    }
    total += slice;
  }
  if ((total.array() - 1.0).abs().maxCoeff() > kNormalizationTolerance) {
    throw Error(ErrorCode::kInvalidConfig,
                "custom table must sum to 1 over outcomes for every (v, w)");
  }
  Kernel k;
  k.variant_ = KernelVariant::kCustomTable;
  k.outcomes_ = std::move(outcomes);
  k.table_support_ = std::move(support);
  k.table_ = std::move(table);
  return k;
}

Kernel Kernel::uniform(std::vector<int> outcomes, Eigen::VectorXd support) {
  const Eigen::Index s = support.size();
  const double p = 1.0 / static_cast<double>(outcomes.size());
  std::vector<Eigen::MatrixXd> table(outcomes.size(),
                                     Eigen::MatrixXd::Constant(s, s, p));
  return custom_table(std::move(outcomes), std::move(support),
                      std::move(table));
}

int Kernel::outcome_index(int x) const {
  for (std::size_t o = 0; o < outcomes_.size(); ++o) {
    if (outcomes_[o] == x) return static_cast<int>(o);
  }
  return -1;
}

double kernel_prob(const Kernel& kernel, int x, double v, double w) {
  const int o = kernel.outcome_index(x);
  if (o < 0) {
    throw Error(ErrorCode::kOutcomeNotInSpace,
                "outcome " + std::to_string(x) + " is not in the kernel's space");
  }
  check_weight(v);
  check_weight(w);
  const double theta = kernel.theta();
  switch (kernel.variant()) {
    case KernelVariant::kBradleyTerry:
      return x == 1 ? v / (v + w) : w / (v + w);
    case KernelVariant::kHomeAdvantage:
      return x == 1 ? theta * v / (theta * v + w) : w / (theta * v + w);
    case KernelVariant::kTies:
      if (x == 1) return v / (v + theta * w);
      if (x == -1) return w / (w + theta * v);
      return (theta * theta - 1.0) * v * w /
             ((theta * v + w) * (v + theta * w));
    case KernelVariant::kDegreeModel:
      return x == 1 ? v * w / (1.0 + v * w) : 1.0 / (1.0 + v * w);
    case KernelVariant::kCustomTable:
      return kernel.table()[o](table_index(kernel, v), table_index(kernel, w));
  }
  return 0.0;
}

EpsilonCertificate epsilon_floor(const Kernel& kernel,
                                 const Eigen::VectorXd& support) {
  EpsilonCertificate best;
  best.epsilon = std::numeric_limits<double>::infinity();
  for (int x : kernel.outcomes()) {
    for (Eigen::Index a = 0; a < support.size(); ++a) {
      for (Eigen::Index b = 0; b < support.size(); ++b) {
        const double p = kernel_prob(kernel, x, support(a), support(b));
        if (p < best.epsilon) best = {p, x, support(a), support(b)};
      }
    }
  }
  if (!(best.epsilon > 0.0)) {
    throw Error(ErrorCode::kH1Violated,
                "k(" + std::to_string(best.x) + ", " + std::to_string(best.v) +
                    ", " + std::to_string(best.w) + ") = 0 on the support");
  }
  return best;
}

std::vector<Eigen::MatrixXd> log_table(const Kernel& kernel,
                                       const Eigen::VectorXd& support) {
  epsilon_floor(kernel, support);
  const Eigen::Index s = support.size();
  std::vector<Eigen::MatrixXd> out;
  out.reserve(kernel.outcomes().size());
  for (int x : kernel.outcomes()) {
    Eigen::MatrixXd m(s, s);
    for (Eigen::Index a = 0; a < s; ++a) {
      for (Eigen::Index b = 0; b < s; ++b) {
        m(a, b) = std::log(kernel_prob(kernel, x, support(a), support(b)));
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

double block_log_kernel(const Kernel& kernel,
                        std::span<const std::pair<int, int>> edges,
                        std::span<const int> x_block, const WeightBlock& lower,
                        const WeightBlock& upper) {
  if (edges.size() != x_block.size() ||
      lower.nodes.size() != lower.weights.size() ||
      upper.nodes.size() != upper.weights.size()) {
    throw Error(ErrorCode::kInconsistentBlockShapes,
                "edges, outcomes and block weights must have matching sizes");
  }
  auto weight_of = [&](int node) {
    for (const WeightBlock* block : {&lower, &upper}) {
      for (std::size_t k = 0; k < block->nodes.size(); ++k) {
        if (block->nodes[k] == node) return block->weights[k];
      }
    }
    throw Error(ErrorCode::kInconsistentBlockShapes,
                "edge endpoint " + std::to_string(node) +
                    " belongs to neither block");
  };
  double total = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    total += std::log(kernel_prob(kernel, x_block[e], weight_of(i), weight_of(j)));
  }
  return total;
}

Kernel kernel_from_json(const nlohmann::json& spec,
                        const Eigen::VectorXd& default_support) {
  const std::string variant = spec.value("variant", std::string());
  if (variant == "bradley_terry") return Kernel::bradley_terry();
  if (variant == "home_advantage") {
    return Kernel::home_advantage(spec.at("theta").get<double>());
  }
  if (variant == "ties") return Kernel::ties(spec.at("theta").get<double>());
  if (variant == "degree_model") return Kernel::degree_model();

  Eigen::VectorXd support = spec.contains("support")
                                ? vector_from_json(spec.at("support"))
                                : default_support;
  std::vector<int> outcomes = spec.contains("outcomes")
                                  ? spec.at("outcomes").get<std::vector<int>>()
                                  : std::vector<int>{0, 1};
  if (variant == "uniform") {
    return Kernel::uniform(std::move(outcomes), std::move(support));
  }
  if (variant == "custom_table") {
    nlohmann::json table;
    if (spec.contains("table")) {
      table = spec.at("table");
    } else if (spec.contains("table_path")) {
      const std::string path = spec.at("table_path").get<std::string>();
      std::ifstream in(path);
      if (!in) throw Error(ErrorCode::kIo, "cannot open kernel table " + path);
      table = nlohmann::json::parse(in);
    } else {
      throw Error(ErrorCode::kInvalidConfig,
                  "custom_table kernel needs \"table\" or \"table_path\"");
    }
    return Kernel::custom_table(std::move(outcomes), std::move(support),
                                table_from_json(table));
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown kernel variant \"" + variant + "\"");
}

nlohmann::json kernel_to_json(const Kernel& kernel) {
  nlohmann::json out = {{"variant", kernel_variant_name(kernel.variant())},
                        {"outcomes", kernel.outcomes()}};
  switch (kernel.variant()) {
    case KernelVariant::kHomeAdvantage:
    case KernelVariant::kTies:
      out["theta"] = kernel.theta();
      break;
    case KernelVariant::kCustomTable: {
      const auto& support = kernel.table_support();
      out["support"] = std::vector<double>(support.data(),
                                           support.data() + support.size());
      nlohmann::json table = nlohmann::json::array();
      for (const auto& slice : kernel.table()) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index a = 0; a < slice.rows(); ++a) {
          std::vector<double> row(slice.cols());
          for (Eigen::Index b = 0; b < slice.cols(); ++b) row[b] = slice(a, b);
          rows.push_back(row);
        }
        table.push_back(rows);
      }
      out["table"] = table;
      break;
    }
    default:
      break;
  }
  return out;
}

}  // namespace lgmle
