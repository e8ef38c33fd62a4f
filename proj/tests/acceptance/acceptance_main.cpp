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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "lgmle/analysis.hpp"
#include "lgmle/estimator.hpp"
#include "lgmle/likelihood.hpp"
#include "lgmle/rr_graph.hpp"
#include "lgmle/simulator.hpp"
#include "oracles.hpp"

namespace {

using lgmle::Dataset;
using lgmle::DiscreteDistribution;
using lgmle::Kernel;
using lgmle::LayerChain;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

double log_sum_exp(const std::vector<double>& terms) {
  double top = -std::numeric_limits<double>::infinity();
  for (double t : terms) top = std::max(top, t);
  double total = 0.0;
  for (double t : terms) total += std::exp(t - top);
  return top + std::log(total);
}

// cond[q][m] = log P(X_q | X_{q+1:m}) for 2 <= q <= m <= Q_max - 1.
std::vector<std::vector<double>> conditional_table(const LayerChain<double>& chain,
                                                   const Eigen::VectorXd& probs,
                                                   int q_max) {
  std::vector<std::vector<double>> cond(q_max, std::vector<double>(q_max, 0.0));
  for (int m = 2; m <= q_max - 1; ++m) {
    for (int q = 2; q <= m; ++q) {
      cond[q][m] = chain.log_prob_range(probs, q, m) -
                   chain.log_prob_range(probs, q + 1, m);
    }
  }
  return cond;
}

double nu_of(double epsilon, int n) { return std::pow(epsilon, n * (n - 1)); }

// Random instance on the strict schedule: n in {2, 3}, s in {2, 3}.
struct Instance {
  Dataset data;
  DiscreteDistribution pi;
  Kernel kernel;
};

Instance random_instance(std::mt19937_64& gen, int index) {
  const int n = 2 + index % 2;
  const int s = 2 + (index / 2) % 2;
  const int N = (n == 2 ? 12 : 14) + 2 * static_cast<int>(gen() % 8);
  const Eigen::VectorXd support = lgmle::testing::random_support(gen, s);
  const DiscreteDistribution pi = lgmle::testing::random_law(gen, support);
  const Kernel kernel = lgmle::testing::kernel_variant(index, gen, support);
  Dataset data = lgmle::simulate(pi, kernel, N, n, gen());
  return {std::move(data), pi, kernel};
}

Outcome layer_structure() {
  int cases = 0;
  int split_tails = 0;
  int mismatches = 0;
  for (int N = 12; N <= 200; N += 2) {
    for (int n = 2; 4 * n < N; ++n) {
      ++cases;
      const auto bfs = lgmle::layer_decomposition(lgmle::build_schedule(N, n));
      const auto formula = lgmle::predicted_layers(N, n);
      const int Q = (N / 2 - 1) / (n - 1);
      const int r = (N / 2 - 1) % (n - 1);
      bool ok = bfs == formula && bfs.q_max == Q && bfs.remainder == r;
      for (int q = 2; q <= Q; ++q) {
        ok = ok && bfs.node_layers[q].size() == static_cast<std::size_t>(2 * (n - 1));
      }
      for (int q = 2; q <= Q - 1; ++q) ok = ok && bfs.factor_size(q) == n * (n - 1);
      if (bfs.depth() == Q + 2) ++split_tails;
      if (!ok) ++mismatches;
    }
  }
  return {mismatches == 0,
          format("%d (N, n) cases, %d mismatches, %d with a split tail", cases,
                 mismatches, split_tails)};
}

Outcome likelihood_oracle() {
  std::mt19937_64 gen(101);
  int instances = 0;
  double worst = 0.0;
  const int sizes[] = {4, 6, 8, 10, 12};
  for (int k = 0; k < 60; ++k) {
    const int s = 2 + k % 2;
    const int N = sizes[(k / 2) % 5];
    const Eigen::VectorXd support = lgmle::testing::random_support(gen, s);
    const DiscreteDistribution pi = lgmle::testing::random_law(gen, support);
    const Kernel kernel = lgmle::testing::kernel_variant(k % 4, gen, support);
    const Dataset data = lgmle::testing::small_dataset(N, 2, pi, kernel, gen());
    std::vector<double> terms;
    lgmle::testing::for_each_assignment(N, s, [&](const std::vector<int>& a) {
      terms.push_back(lgmle::testing::joint_log_weight(data, pi, kernel, a));
    });
    const double oracle = log_sum_exp(terms);
    const double fast = lgmle::log_likelihood(data, pi, kernel);
    worst = std::max(worst, std::abs(fast - oracle) / std::abs(oracle));
    ++instances;
  }
  return {worst <= 1e-10,
          format("%d instances, max relative error %.3g", instances, worst)};
}

Outcome forgetting_bounds() {
  std::mt19937_64 gen(202);
  long checks = 0;
  int violations = 0;
  double tightest = 0.0;
  for (int k = 0; k < 40; ++k) {
    const Instance inst = random_instance(gen, k);
    const int n = inst.data.graph.rounds();
    const int Q = inst.data.layers.q_max;
    const LayerChain<double> chain(inst.data, inst.kernel, inst.pi.support());
    const double log_eps = std::log(chain.epsilon());
    const double nu = nu_of(chain.epsilon(), n);
    const auto cond = conditional_table(chain, inst.pi.probs(), Q);
    for (int q = 2; q <= Q - 1; ++q) {
      for (int m = q; m <= Q - 1; ++m) {
        ++checks;
        const double cap = chain.factor_size(q) * -log_eps;
        if (std::abs(cond[q][m]) > cap * (1 + 1e-12)) ++violations;
        for (int m2 = m + 1; m2 <= Q - 1; ++m2) {
          ++checks;
          const double gap = std::abs(cond[q][m] - cond[q][m2]);
          const double bound = std::pow(1 - nu, m - q - 1) / nu;
          if (gap > bound) ++violations;
          tightest = std::max(tightest, gap / bound);
        }
      }
    }
  }
  return {violations == 0,
          format("%ld checks, %d violations, max gap/bound %.3g", checks,
                 violations, tightest)};
}

Outcome bounded_differences() {
  std::mt19937_64 gen(303);
  long flips = 0;
  int violations = 0;
  double tightest = 0.0;
  for (int k = 0; k < 12; ++k) {
    const Instance inst = random_instance(gen, k);
    const Dataset& base = inst.data;
    const int n = base.graph.rounds();
    const int Q = base.layers.q_max;
    const int m = Q - 1;
    std::map<std::pair<int, int>, std::size_t> edge_index;
    for (std::size_t e = 0; e < base.graph.edges().size(); ++e) {
      edge_index[{base.graph.edges()[e].i, base.graph.edges()[e].j}] = e;
    }
    const LayerChain<double> chain(base, inst.kernel, inst.pi.support());
    const double nu = nu_of(chain.epsilon(), n);
    const auto cond = conditional_table(chain, inst.pi.probs(), Q);
    for (int qt = 3; qt <= m; ++qt) {
      std::vector<std::pair<int, int>> factor = base.layers.edge_layers[qt].to_next;
      const auto& within = base.layers.edge_layers[qt + 1].within;
      factor.insert(factor.end(), within.begin(), within.end());
      for (const auto& [i, j] : factor) {
        const std::size_t e = edge_index.at({std::min(i, j), std::max(i, j)});
        for (int x : inst.kernel.outcomes()) {
          if (x == base.outcomes[e]) continue;
          Dataset flipped = base;
          flipped.outcomes[e] = x;
          const LayerChain<double> other(flipped, inst.kernel, inst.pi.support());
          const auto cond2 = conditional_table(other, inst.pi.probs(), Q);
          for (int q = 2; q < qt; ++q) {
            ++flips;
            const double gap = std::abs(cond[q][m] - cond2[q][m]);
            const double bound = std::pow(1 - nu, qt - q - 1) / nu;
            if (gap > bound) ++violations;
            tightest = std::max(tightest, gap / bound);
          }
        }
      }
    }
  }
  return {violations == 0,
          format("%ld flip comparisons, %d violations, max gap/bound %.3g", flips,
                 violations, tightest)};
}

Outcome increment_bound() {
  std::mt19937_64 gen(404);
  int pairs = 0;
  long checks = 0;
  int violations = 0;
  double tightest = 0.0;
  for (int k = 0; k < 120; ++k) {
    const Instance inst = random_instance(gen, k);
    const int n = inst.data.graph.rounds();
    const int Q = inst.data.layers.q_max;
    const DiscreteDistribution other =
        lgmle::testing::random_law(gen, inst.pi.support());
    ++pairs;
    const LayerChain<double> chain(inst.data, inst.kernel, inst.pi.support());
    const double nu = nu_of(chain.epsilon(), n);
    const double tv_v = lgmle::product_tv(inst.pi, other, 2 * (n - 1));
    if (tv_v > 2 * (n - 1) * lgmle::tv_distance(inst.pi, other) + 1e-12) {
      ++violations;
    }
    const auto a = conditional_table(chain, inst.pi.probs(), Q);
    const auto b = conditional_table(chain, other.probs(), Q);
    for (int q = 2; q <= Q - 1; ++q) {
      for (int m = q; m <= Q - 1; ++m) {
        ++checks;
        double series = 0.0;
        for (int l = 1; l <= m - q + 1; ++l) {
          series += std::pow(1 - nu, l - 1) / std::pow(nu, 3);
        }
        const double bound = 2 * series * tv_v;
        const double gap = std::abs(a[q][m] - b[q][m]);
        if (gap > bound) ++violations;
        if (bound > 0) tightest = std::max(tightest, gap / bound);
      }
    }
  }
  return {violations == 0,
          format("%d law pairs, %ld checks, %d violations, max gap/bound %.3g",
                 pairs, checks, violations, tightest)};
}

Outcome em_monotonicity() {
  std::mt19937_64 gen(505);
  int runs = 0;
  int drops = 0;
  double worst_drop = 0.0;
  int oracle_runs = 0;
  double worst_marginal = 0.0;
  for (int k = 0; k < 120; ++k) {
    const int n = 2 + k % 2;
    const int s = 2 + (k / 2) % 2;
    const int N = 4 * n + 2 + 2 * static_cast<int>(gen() % 10);
    const Eigen::VectorXd support = lgmle::testing::random_support(gen, s);
    const DiscreteDistribution pi = lgmle::testing::random_law(gen, support);
    const Kernel kernel = lgmle::testing::kernel_variant(k, gen, support);
    const Dataset data = lgmle::simulate(pi, kernel, N, n, gen());
    lgmle::FitConfig config;
    config.support = support;
    config.init = lgmle::InitMode::kRandom;
    config.max_iters = 200;
    config.tol = 1e-14;
    config.seed = gen();
    const auto fit = lgmle::fit_mle(data, kernel, config);
    ++runs;
    const auto& path = fit.trajectory;
    for (std::size_t t = 1; t < path.size(); ++t) {
      const double drop = path[t - 1] - path[t];
      worst_drop = std::max(worst_drop, drop);
      if (drop > 1e-9) ++drops;
    }
  }
  for (int k = 0; k < 40; ++k) {
    const int s = 2 + k % 2;
    const int N = s == 2 ? 12 : 10;
    const Eigen::VectorXd support = lgmle::testing::random_support(gen, s);
    const DiscreteDistribution pi = lgmle::testing::random_law(gen, support);
    const Kernel kernel = lgmle::testing::kernel_variant(k, gen, support);
    const Dataset data = lgmle::testing::small_dataset(N, 2 + k % 2, pi, kernel, gen());
    const Eigen::MatrixXd fast = lgmle::posterior_node_marginals(data, pi, kernel);
    const Eigen::MatrixXd oracle = lgmle::testing::brute_force_marginals(data, pi, kernel);
    worst_marginal = std::max(worst_marginal, (fast - oracle).cwiseAbs().maxCoeff());
    ++oracle_runs;
  }
  return {drops == 0 && worst_marginal <= 1e-10,
          format("%d EM runs, %d drops > 1e-9 (max %.3g); %d marginal oracles, "
                 "max error %.3g",
                 runs, drops, worst_drop, oracle_runs, worst_marginal)};
}

Outcome excess_risk_sign() {
  const Eigen::VectorXd support = (Eigen::VectorXd(3) << 1.0, 2.0, 4.0).finished();
  const DiscreteDistribution pi_star(support, Eigen::Vector3d(0.2, 0.5, 0.3));
  const Kernel bt = Kernel::bradley_terry();
  const lgmle::LimitPanel panel(pi_star, bt, 2000, 3, 20, 707, 1);
  std::vector<DiscreteDistribution> candidates = {
      pi_star, DiscreteDistribution::uniform(support)};
  std::mt19937_64 gen(708);
  while (candidates.size() < 10) {
    candidates.push_back(lgmle::testing::random_law(gen, support));
  }
  int bad = 0;
  double self_excess = 0.0;
  double self_se = 0.0;
  double lowest_z = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto report = lgmle::excess_risk(panel, candidates[c]);
    const double se = report.std_error_excess;
    if (report.excess_risk < -3 * se) ++bad;
    if (se > 0) lowest_z = std::min(lowest_z, report.excess_risk / se);
    if (c == 0) {
      self_excess = report.excess_risk;
      self_se = se;
      if (std::abs(report.excess_risk) > 3 * se) ++bad;
    }
  }
  return {bad == 0,
          format("10 candidates, %d failures, min excess/se %.3g, "
                 "excess at truth %.3g (se %.3g)",
                 bad, lowest_z, self_excess, self_se)};
}

Outcome risk_scaling() {
  const Eigen::VectorXd support = (Eigen::VectorXd(2) << 1.0, 10.0).finished();
  const DiscreteDistribution pi_star(support, Eigen::Vector2d(0.3, 0.7));
  lgmle::ScalingParams params;
  params.n = 3;
  params.N_list = {500, 1000, 2000, 4000};
  params.seeds = 20;
  params.seed = 808;
  params.eval_N = 20000;
  params.eval_replicates = 50;
  params.fit.max_iters = 2000;
  params.fit.tol = 1e-10;
  params.t = 1.0;
  const auto table = lgmle::scaling_experiment(pi_star, Kernel::degree_model(), params);
  bool ok = true;
  std::string medians;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& row = table.rows[k];
    if (k > 0 && row.median_excess > table.rows[k - 1].median_excess) ok = false;
    if (!(row.median_excess < row.rhs)) ok = false;
    medians += format("%s%d:%.3g", k ? " " : "", row.N, row.median_excess);
  }
  const double ratio = table.rows.front().median_excess / table.rows.back().median_excess;
  if (!(ratio >= 2.0)) ok = false;
  return {ok, format("medians %s, ratio %.3g, rhs at 4000 %.3g", medians.c_str(),
                     ratio, table.rows.back().rhs)};
}

Outcome performance() {
  const Eigen::VectorXd support = (Eigen::VectorXd(4) << 1.0, 2.0, 3.0, 4.0).finished();
  const DiscreteDistribution pi(support, Eigen::Vector4d(0.1, 0.2, 0.3, 0.4));
  const Kernel bt = Kernel::bradley_terry();
  const Dataset data = lgmle::simulate(pi, bt, 2000, 3, 909);
  const auto start = Clock::now();
  const double value = lgmle::log_likelihood(data, pi, bt);
  const double elapsed = seconds_since(start);
  return {std::isfinite(value) && elapsed < 5.0,
          format("log-likelihood %.6f in %.3f s over %d layers", value, elapsed,
                 data.layers.depth())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 layer structure", layer_structure},
      {"2 likelihood oracle", likelihood_oracle},
      {"3 forgetting bounds", forgetting_bounds},
      {"4 bounded differences", bounded_differences},
      {"5 increment bound", increment_bound},
      {"6 EM monotonicity", em_monotonicity},
      {"7 excess risk sign", excess_risk_sign},
      {"8 risk scaling", risk_scaling},
      {"9 performance", performance},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failed;
    std::printf("%s criterion %s: %s [%.1f s]\n", outcome.pass ? "PASS" : "FAIL",
                name.c_str(), outcome.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
