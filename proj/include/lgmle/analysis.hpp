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

#ifndef LGMLE_ANALYSIS_HPP_
#define LGMLE_ANALYSIS_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "json.hpp"
#include "lgmle/distribution.hpp"
#include "lgmle/estimator.hpp"
#include "lgmle/kernels.hpp"
#include "lgmle/likelihood.hpp"
#include "lgmle/simulator.hpp"

namespace lgmle {

// sum_a |p_a - q_a| after embedding both laws in the union of their grids.
double tv_distance(const DiscreteDistribution& pi,
                   const DiscreteDistribution& pi_prime);

// tv log(1/tv) for tv <= 1/e, tv above; 0 at tv = 0.
double distance_d_from_tv(double tv);
double distance_d(const DiscreteDistribution& pi,
                  const DiscreteDistribution& pi_prime);

// Exact TV between the laws of `copies` i.i.d. draws (same grid required).
double product_tv(const DiscreteDistribution& pi,
                  const DiscreteDistribution& pi_prime, int copies);

// The t in (0, 1/e] with t log(1/t) = y for y <= 1/e, and y itself above.
double inverse_distance_d(double y);

// Datasets drawn once from pi_star and shared by every candidate evaluated
// against them. Each one is scored through the interior chain
// log P_pi(X_2, ..., X_{Q-1}) / (Q - 2), where every factor has n(n-1) edges.
class LimitPanel {
 public:
  LimitPanel(const DiscreteDistribution& pi_star, const Kernel& kernel, int N,
             int n, int replicates, std::uint64_t seed, int threads = 1);

  int num_nodes() const { return N_; }
  int rounds() const { return n_; }
  int replicates() const { return static_cast<int>(seeds_.size()); }
  // Number of interior factors, Q - 2.
  int window() const { return window_; }
  const std::vector<std::uint64_t>& seeds() const { return seeds_; }
  const DiscreteDistribution& pi_star() const { return pi_star_; }
  const Kernel& kernel() const { return kernel_; }

  // Interior log-likelihood per factor, one value per replicate. pi must
  // live on the grid of pi_star (it is embedded there).
  std::vector<double> evaluate(const DiscreteDistribution& pi) const;
  // Unnormalized interior log-likelihoods.
  std::vector<double> interior_log_liks(const DiscreteDistribution& pi) const;
  // Same with an explicit worker count in place of the panel's own.
  std::vector<double> evaluate(const DiscreteDistribution& pi,
                               int threads) const;
  std::vector<double> interior_log_liks(const DiscreteDistribution& pi,
                                        int threads) const;

 private:
  DiscreteDistribution pi_star_;
  Kernel kernel_;
  int N_ = 0;
  int n_ = 0;
  int window_ = 0;
  int threads_ = 1;
  std::vector<std::uint64_t> seeds_;
  std::vector<std::unique_ptr<LayerChain<double>>> chains_;
};

struct LimitEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<double> values;
};

struct RiskParams {
  int N = 2000;
  int n = 3;
  int replicates = 20;
  std::uint64_t seed = 0;
  int threads = 1;
  // Smallest N accepted for the panel.
  int min_N = 100;
};

struct RiskReport {
  explicit RiskReport(DiscreteDistribution p) : pi(std::move(p)) {}

  DiscreteDistribution pi;
  double L_hat_star = 0.0;
  double std_error_star = 0.0;
  double L_hat_pi = 0.0;
  double std_error_pi = 0.0;
  // L_hat_star - L_hat_pi and the standard error of the paired differences.
  double excess_risk = 0.0;
  double std_error_excess = 0.0;
  int N_used = 0;
  int replicates = 0;
  int window = 0;

  // excess_risk >= -3 std_error_excess.
  bool non_negative_within_error() const;
};

LimitEstimate summarize(const std::vector<double>& values);

LimitEstimate estimate_limit_likelihood(const DiscreteDistribution& pi,
                                        const Kernel& kernel,
                                        const DiscreteDistribution& pi_star,
                                        const RiskParams& params);

RiskReport excess_risk(const DiscreteDistribution& pi, const Kernel& kernel,
                       const DiscreteDistribution& pi_star,
                       const RiskParams& params);
// Same estimate on an existing panel.
RiskReport excess_risk(const LimitPanel& panel, const DiscreteDistribution& pi);

// n eps^{-6 n^2} / sqrt(N) * (entropy_integral + t), constant set to 1.
double theorem2_rhs(int n, double epsilon, double N, double entropy_integral,
                    double t);

// Integral over (0, 2] of sqrt((s - 1) log(1 + 4 / delta(e))) de, where
// delta = inverse_distance_d maps a d-radius to a TV radius and
// (1 + 4/r)^{s-1} bounds the TV covering number of the simplex. The change
// of variable e = 2 u^2 is followed by a midpoint rule on `resolution` cells.
double simplex_entropy_integral(int s, int resolution = 4000);

struct ScalingParams {
  int n = 2;
  std::vector<int> N_list;
  int seeds = 20;
  std::uint64_t seed = 0;
  // Panel used to score every fitted estimate.
  int eval_N = 20000;
  int eval_replicates = 50;
  // EM settings; the support is taken from pi_star.
  FitConfig fit;
  double t = 1.0;
  int quadrature_resolution = 4000;
  int threads = 1;
};

struct ScalingRow {
  int N = 0;
  double median_excess = 0.0;
  double iqr = 0.0;
  double rhs = 0.0;
  std::vector<double> excess;
  std::vector<std::vector<double>> estimates;
};

struct ScalingTable {
  double epsilon = 0.0;
  double entropy_integral = 0.0;
  std::vector<ScalingRow> rows;
};

// Fits the MLE over the simplex on pi_star's support for `seeds` datasets
// per N and scores each fit by its excess risk on a shared panel.
ScalingTable scaling_experiment(const DiscreteDistribution& pi_star,
                                const Kernel& kernel,
                                const ScalingParams& params);

struct ZParams {
  int N = 400;
  int n = 2;
  int replicates = 200;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct ZSummary {
  explicit ZSummary(DiscreteDistribution p) : pi(std::move(p)) {}

  DiscreteDistribution pi;
  double mean_per_layer = 0.0;
  // Sample standard deviation of sqrt(Q) Z_pi.
  double sd = 0.0;
  // Fraction of replicates with |sqrt(Q) Z_pi| > t sqrt(2) sd, t = 1, 2, 3,
  // and the envelope 2 exp(-t^2).
  std::array<double, 3> exceedance{};
  std::array<double, 3> envelope{};
  // Relative to pi_list[0]: d(pi, pi_0) and sd of sqrt(Q)(Z_pi - Z_pi0).
  double distance_to_first = 0.0;
  double increment_sd = 0.0;
};

// Z_pi = (S_pi - mean S_pi) / Q over replicates, with S_pi the interior
// log-likelihood of a dataset drawn from pi_star.
std::vector<ZSummary> z_process_concentration(
    const std::vector<DiscreteDistribution>& pi_list, const Kernel& kernel,
    const DiscreteDistribution& pi_star, const ZParams& params);

// Linear-interpolation quantile of an unsorted sample.
double quantile(std::vector<double> values, double p);

// Header `N,median_excess,iqr,rhs`.
void write_scaling_csv(const ScalingTable& table, std::ostream& out);
nlohmann::json scaling_to_json(const ScalingTable& table);
nlohmann::json risk_report_to_json(const RiskReport& report);
nlohmann::json z_summaries_to_json(const std::vector<ZSummary>& summaries);

}  // namespace lgmle

#endif  // LGMLE_ANALYSIS_HPP_
