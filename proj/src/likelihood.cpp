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

#include "lgmle/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_map>

#include "lgmle/error.hpp"

namespace lgmle {
namespace {

constexpr double kBruteForceLimit = 1e6;

std::int64_t edge_key(int i, int j) {
  return (static_cast<std::int64_t>(i) << 32) | static_cast<std::uint32_t>(j);
}

Eigen::Index int_pow(Eigen::Index base, int exponent) {
  Eigen::Index out = 1;
  for (int k = 0; k < exponent; ++k) out *= base;
  return out;
}

template <typename Vector>
typename Vector::Scalar tv_norm(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().sum();
}

}  // namespace

void check_conditional_range(const LayerStructure& layers, int q, int m) {
  if (q < 2 || m < q || m > layers.q_max - 1) {
    throw Error(ErrorCode::kLayerOutOfRange,
                "need 2 <= q <= m <= Q_max - 1 (got q=" + std::to_string(q) +
                    ", m=" + std::to_string(m) +
                    ", Q_max=" + std::to_string(layers.q_max) + ")");
  }
}

template <typename Scalar>
LayerChain<Scalar>::LayerChain(const Dataset& data, const Kernel& kernel,
                               const Eigen::VectorXd& support,
                               std::size_t cache_entries)
    : layers_(data.layers),
      support_(support),
      log_table_(log_table(kernel, support)),
      epsilon_(epsilon_floor(kernel, support).epsilon),
      blocks_(data.layers.node_layers) {
  const int N = data.graph.num_nodes();
  if (layers_.num_nodes != N || blocks_.empty()) {
    throw Error(ErrorCode::kInconsistentBlockShapes,
                "dataset layers do not match its graph");
  }
  node_block_.assign(N + 1, -1);
  node_position_.assign(N + 1, -1);
  for (std::size_t q = 0; q < blocks_.size(); ++q) {
    for (std::size_t p = 0; p < blocks_[q].size(); ++p) {
      node_block_[blocks_[q][p]] = static_cast<int>(q);
      node_position_[blocks_[q][p]] = static_cast<int>(p);
    }
  }

  std::unordered_map<std::int64_t, int> outcome_of;
  const auto& edges = data.graph.edges();
  if (data.outcomes.size() != edges.size()) {
    throw Error(ErrorCode::kInconsistentBlockShapes,
                "dataset needs one outcome per edge");
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const int o = kernel.outcome_index(data.outcomes[e]);
    if (o < 0) {
      throw Error(ErrorCode::kOutcomeNotInSpace,
                  "outcome " + std::to_string(data.outcomes[e]) +
                      " is not in the kernel's space");
    }
    outcome_of[edge_key(edges[e].i, edges[e].j)] = o;
  }

  const int D = num_factors();
  factor_edges_.resize(D);
  factor_outcomes_.resize(D);
  std::size_t total_entries = 0;
  for (int q = 0; q < D; ++q) {
    auto add = [&](const std::vector<std::pair<int, int>>& list) {
      for (const auto& [i, j] : list) {
        const auto it = outcome_of.find(edge_key(i, j));
        if (it == outcome_of.end()) {
          throw Error(ErrorCode::kInconsistentBlockShapes,
                      "layer edge missing from the dataset");
        }
        factor_edges_[q].emplace_back(i, j);
        factor_outcomes_[q].push_back(it->second);
      }
    };
    add(layers_.edge_layers.at(q).to_next);
    add(layers_.edge_layers.at(q + 1).within);
    total_entries += static_cast<std::size_t>(block_states(q)) *
                     static_cast<std::size_t>(block_states(q + 1));
  }
  if (!layers_.edge_layers.empty() && !layers_.edge_layers.front().within.empty()) {
    throw Error(ErrorCode::kInconsistentBlockShapes,
                "V_0 cannot carry internal edges");
  }

  if (total_entries <= cache_entries) {
    std::vector<ScaledFactor<Scalar>> cache;
    cache.reserve(D);
    for (int q = 0; q < D; ++q) cache.push_back(compute_factor(q));
    cache_ = std::move(cache);
  }
}

template <typename Scalar>
Eigen::Index LayerChain<Scalar>::block_states(int q) const {
  return int_pow(support_.size(), block_size(q));
}

template <typename Scalar>
int LayerChain<Scalar>::factor_size(int q) const {
  return static_cast<int>(factor_edges_.at(q).size());
}

template <typename Scalar>
std::vector<int> LayerChain<Scalar>::digits(int q, int position) const {
  const Eigen::Index s = support_.size();
  const Eigen::Index stride = int_pow(s, block_size(q) - 1 - position);
  std::vector<int> out(block_states(q));
  for (Eigen::Index u = 0; u < static_cast<Eigen::Index>(out.size()); ++u) {
    out[u] = static_cast<int>((u / stride) % s);
  }
  return out;
}

template <typename Scalar>
ScaledFactor<Scalar> LayerChain<Scalar>::compute_factor(int q) const {
  const Eigen::Index rows = block_states(q);
  const Eigen::Index cols = block_states(q + 1);
  Matrix log_k = Matrix::Zero(rows, cols);
  Vector within = Vector::Zero(cols);

  for (std::size_t e = 0; e < factor_edges_[q].size(); ++e) {
    const auto [i, j] = factor_edges_[q][e];
    const Eigen::MatrixXd& table = log_table_[factor_outcomes_[q][e]];
    const int bi = node_block_[i];
    const int bj = node_block_[j];
    if (bi == q + 1 && bj == q + 1) {
      const auto di = digits(q + 1, node_position_[i]);
      const auto dj = digits(q + 1, node_position_[j]);
      for (Eigen::Index v = 0; v < cols; ++v) {
        within(v) += static_cast<Scalar>(table(di[v], dj[v]));
      }
    } else if ((bi == q && bj == q + 1) || (bi == q + 1 && bj == q)) {
      // Orient the table as (lower digit, upper digit).
      const Eigen::MatrixXd oriented =
          bi == q ? table : Eigen::MatrixXd(table.transpose());
      const int lower_node = bi == q ? i : j;
      const int upper_node = bi == q ? j : i;
      const auto dl = digits(q, node_position_[lower_node]);
      const auto du = digits(q + 1, node_position_[upper_node]);
      for (Eigen::Index v = 0; v < cols; ++v) {
        Scalar* column = log_k.col(v).data();
        const int d = du[v];
        for (Eigen::Index u = 0; u < rows; ++u) {
          column[u] += static_cast<Scalar>(oriented(dl[u], d));
        }
      }
    } else {
      throw Error(ErrorCode::kInconsistentBlockShapes,
                  "edge {" + std::to_string(i) + "," + std::to_string(j) +
                      "} does not belong to factor " + std::to_string(q));
    }
  }
  log_k.rowwise() += within.transpose();

  ScaledFactor<Scalar> out;
  out.log_shift = log_k.maxCoeff();
  out.kernel = (log_k.array() - out.log_shift).exp().matrix();
  return out;
}

template <typename Scalar>
const ScaledFactor<Scalar>& LayerChain<Scalar>::fetch(
    int q, ScaledFactor<Scalar>& scratch) const {
  if (cache_) return (*cache_)[q];
  scratch = compute_factor(q);
  return scratch;
}

template <typename Scalar>
ScaledFactor<Scalar> LayerChain<Scalar>::factor(int q) const {
  if (q < 0 || q >= num_factors()) {
    throw Error(ErrorCode::kLayerOutOfRange,
                "factor index " + std::to_string(q) + " out of range");
  }
  ScaledFactor<Scalar> scratch;
  return fetch(q, scratch);
}

template <typename Scalar>
typename LayerChain<Scalar>::Vector LayerChain<Scalar>::block_prior(
    const Vector& probs, int q) const {
  if (probs.size() != support_.size()) {
    throw Error(ErrorCode::kSupportMismatch,
                "prior has " + std::to_string(probs.size()) +
                    " weights but the chain's grid has " +
                    std::to_string(support_.size()));
  }
  return product_measure(probs, block_size(q));
}

template <typename Scalar>
std::vector<Scalar> LayerChain<Scalar>::layer_log_normalizers(
    const Vector& probs) const {
  std::vector<Scalar> norms;
  norms.reserve(num_factors());
  Vector alpha = block_prior(probs, 0);
  ScaledFactor<Scalar> scratch;
  for (int q = 0; q < num_factors(); ++q) {
    const auto& f = fetch(q, scratch);
    Vector next = (f.kernel.transpose() * alpha).cwiseProduct(
        block_prior(probs, q + 1));
    const Scalar c = next.sum();
    using std::log;
    norms.push_back(log(c) + f.log_shift);
    alpha = next / c;
  }
  return norms;
}

template <typename Scalar>
Scalar LayerChain<Scalar>::log_likelihood(const Vector& probs) const {
  Scalar total = 0;
  for (Scalar c : layer_log_normalizers(probs)) total += c;
  return total;
}

template <typename Scalar>
Scalar LayerChain<Scalar>::log_prob_range(const Vector& probs, int a,
                                          int b) const {
  if (a > b) return Scalar(0);
  if (a < 0 || b >= num_factors()) {
    throw Error(ErrorCode::kLayerOutOfRange,
                "factor range [" + std::to_string(a) + ", " +
                    std::to_string(b) + "] out of range");
  }
  Vector alpha = block_prior(probs, a);
  Scalar total = 0;
  ScaledFactor<Scalar> scratch;
  for (int q = a; q <= b; ++q) {
    const auto& f = fetch(q, scratch);
    Vector next = (f.kernel.transpose() * alpha).cwiseProduct(
        block_prior(probs, q + 1));
    const Scalar c = next.sum();
    using std::log;
    total += log(c) + f.log_shift;
    alpha = next / c;
  }
  return total;
}

template <typename Scalar>
BackwardMessages LayerChain<Scalar>::backward_messages(
    const Vector& probs) const {
  const int D = num_factors();
  BackwardMessages out;
  out.log_messages.resize(D + 1);
  out.log_norms.assign(D + 1, 0.0);
  Vector beta = Vector::Constant(block_states(D), Scalar(1));
  Scalar norm = beta.sum();
  beta /= norm;
  using std::log;
  out.log_norms[D] = static_cast<double>(log(norm));
  out.log_messages[D] = beta.array().log().template cast<double>().matrix();
  ScaledFactor<Scalar> scratch;
  for (int q = D - 1; q >= 0; --q) {
    const auto& f = fetch(q, scratch);
    beta = f.kernel * block_prior(probs, q + 1).cwiseProduct(beta);
    norm = beta.sum();
    beta /= norm;
    out.log_norms[q] = static_cast<double>(log(norm) + f.log_shift);
    out.log_messages[q] = beta.array().log().template cast<double>().matrix();
  }
  return out;
}

template <typename Scalar>
typename LayerChain<Scalar>::Matrix LayerChain<Scalar>::node_marginals(
    const Vector& probs) const {
  const int D = num_factors();
  std::vector<Vector> alphas(D + 1);
  alphas[0] = block_prior(probs, 0);
  ScaledFactor<Scalar> scratch;
  for (int q = 0; q < D; ++q) {
    const auto& f = fetch(q, scratch);
    Vector next = (f.kernel.transpose() * alphas[q]).cwiseProduct(
        block_prior(probs, q + 1));
    alphas[q + 1] = next / next.sum();
  }

  const Eigen::Index s = support_.size();
  Matrix out = Matrix::Zero(num_nodes(), s);
  Vector beta = Vector::Constant(block_states(D), Scalar(1));
  for (int q = D; q >= 0; --q) {
    if (q < D) {
      const auto& f = fetch(q, scratch);
      beta = f.kernel * block_prior(probs, q + 1).cwiseProduct(beta);
      beta /= beta.sum();
    }
    Vector post = alphas[q].cwiseProduct(beta);
    post /= post.sum();
    for (int p = 0; p < block_size(q); ++p) {
      const auto d = digits(q, p);
      auto row = out.row(blocks_[q][p] - 1);
      for (Eigen::Index u = 0; u < post.size(); ++u) row(d[u]) += post(u);
    }
  }
  return out;
}

template <typename Scalar>
ContractionProfile LayerChain<Scalar>::contraction(const Vector& probs, int q,
                                                   int m, const Vector& mu1,
                                                   const Vector& mu2) const {
  check_conditional_range(layers_, q, m);
  if (mu1.size() != block_states(m + 1) || mu2.size() != block_states(m + 1)) {
    throw Error(ErrorCode::kInconsistentBlockShapes,
                "initial laws must live on the block states of V_{m+1}");
  }
  std::vector<Vector> filters(m + 2);
  filters[q] = block_prior(probs, q);
  ScaledFactor<Scalar> scratch;
  for (int k = q; k <= m; ++k) {
    const auto& f = fetch(k, scratch);
    Vector next = (f.kernel.transpose() * filters[k]).cwiseProduct(
        block_prior(probs, k + 1));
    filters[k + 1] = next / next.sum();
  }

  ContractionProfile profile;
  profile.q = q;
  profile.m = m;
  profile.epsilon = epsilon_;
  Vector a = mu1;
  Vector b = mu2;
  const double initial_tv = static_cast<double>(tv_norm(a, b));
  double previous_tv = initial_tv;
  double cumulative = initial_tv;
  for (int k = m; k >= q; --k) {
    const auto& f = fetch(k, scratch);
    // Row u of `backward` is the law of V_k given V_{k+1} = u.
    Matrix backward = f.kernel.transpose() * filters[k].asDiagonal();
    backward.array().colwise() /= backward.rowwise().sum().array();
    a = backward.transpose() * a;
    b = backward.transpose() * b;

    ContractionStep step;
    step.layer = k;
    step.tv = static_cast<double>(tv_norm(a, b));
    step.previous_tv = previous_tv;
    step.nu = std::exp(factor_size(k) * std::log(epsilon_));
    step.step_bound = (1.0 - step.nu) * previous_tv;
    cumulative *= 1.0 - step.nu;
    step.cumulative_bound = cumulative;
    step.dobrushin = std::numeric_limits<double>::quiet_NaN();
    if (backward.rows() <= 256) {
      Scalar worst = 0;
      for (Eigen::Index u = 0; u < backward.rows(); ++u) {
        for (Eigen::Index w = u + 1; w < backward.rows(); ++w) {
          worst = std::max<Scalar>(
              worst, (backward.row(u) - backward.row(w)).cwiseAbs().sum());
        }
      }
      step.dobrushin = static_cast<double>(worst) / 2.0;
    }
    profile.steps.push_back(step);
    previous_tv = step.tv;
  }
  return profile;
}

template class LayerChain<double>;
template class LayerChain<long double>;

double log_likelihood(const Dataset& data, const DiscreteDistribution& pi,
                      const Kernel& kernel) {
  const LayerChain<double> chain(data, kernel, pi.support());
  return chain.log_likelihood(pi.probs());
}

double brute_force_log_likelihood(const Dataset& data,
                                  const DiscreteDistribution& pi,
                                  const Kernel& kernel) {
  const int N = data.graph.num_nodes();
  const Eigen::Index s = pi.size();
  if (std::pow(static_cast<double>(s), N) > kBruteForceLimit) {
    throw Error(ErrorCode::kTooLargeForBruteForce,
                "s^N = " + std::to_string(s) + "^" + std::to_string(N) +
                    " exceeds 1e6 assignments");
  }
  const auto tables = log_table(kernel, pi.support());
  const auto& edges = data.graph.edges();
  std::vector<int> outcome_index(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    outcome_index[e] = kernel.outcome_index(data.outcomes[e]);
    if (outcome_index[e] < 0) {
      throw Error(ErrorCode::kOutcomeNotInSpace,
                  "outcome " + std::to_string(data.outcomes[e]) +
                      " is not in the kernel's space");
    }
  }
  const Eigen::VectorXd log_pi = pi.probs().array().log();

  std::vector<double> terms;
  std::vector<int> assignment(N + 1, 0);
  while (true) {
    double value = 0.0;
    for (int i = 1; i <= N; ++i) value += log_pi(assignment[i]);
    if (std::isfinite(value)) {
      for (std::size_t e = 0; e < edges.size(); ++e) {
        value += tables[outcome_index[e]](assignment[edges[e].i],
                                          assignment[edges[e].j]);
      }
      terms.push_back(value);
    }
    int i = N;
    while (i >= 1 && assignment[i] == s - 1) assignment[i--] = 0;
    if (i < 1) break;
    ++assignment[i];
  }
  const double top = *std::max_element(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += std::exp(t - top);
  return top + std::log(total);
}

double conditional_log_prob(const Dataset& data, const DiscreteDistribution& pi,
                            const Kernel& kernel, int q, int m) {
  check_conditional_range(data.layers, q, m);
  const LayerChain<double> chain(data, kernel, pi.support());
  return chain.log_prob_range(pi.probs(), q, m) -
         chain.log_prob_range(pi.probs(), q + 1, m);
}

Eigen::MatrixXd posterior_node_marginals(const Dataset& data,
                                         const DiscreteDistribution& pi,
                                         const Kernel& kernel) {
  const LayerChain<double> chain(data, kernel, pi.support());
  return chain.node_marginals(pi.probs());
}

BackwardMessages backward_messages(const Dataset& data,
                                   const DiscreteDistribution& pi,
                                   const Kernel& kernel) {
  const LayerChain<double> chain(data, kernel, pi.support());
  return chain.backward_messages(pi.probs());
}

ContractionProfile backward_contraction_profile(const Dataset& data,
                                                const DiscreteDistribution& pi,
                                                const Kernel& kernel, int q,
                                                int m) {
  check_conditional_range(data.layers, q, m);
  const LayerChain<double> chain(data, kernel, pi.support());
  const Eigen::Index states = chain.block_states(m + 1);
  Eigen::VectorXd mu1 = Eigen::VectorXd::Zero(states);
  Eigen::VectorXd mu2 = Eigen::VectorXd::Zero(states);
  mu1(0) = 1.0;
  mu2(states - 1) = 1.0;
  return chain.contraction(pi.probs(), q, m, mu1, mu2);
}

std::vector<double> layer_log_normalizers(const Dataset& data,
                                          const DiscreteDistribution& pi,
                                          const Kernel& kernel) {
  const LayerChain<double> chain(data, kernel, pi.support());
  return chain.layer_log_normalizers(pi.probs());
}

void write_log_normalizers_csv(const std::vector<double>& log_norms,
                               std::ostream& out) {
  out << "layer,log_norm\n";
  const auto old_precision = out.precision(17);
  for (std::size_t q = 0; q < log_norms.size(); ++q) {
    out << q << ',' << log_norms[q] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace lgmle
