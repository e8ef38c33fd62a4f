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

#include "lgmle/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "lgmle/error.hpp"
#include "lgmle/parallel.hpp"
#include "lgmle/rng.hpp"

namespace lgmle {
namespace {

Eigen::VectorXd union_grid(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  std::vector<double> merged(a.data(), a.data() + a.size());
  for (Eigen::Index k = 0; k < b.size(); ++k) {
    if (DiscreteDistribution::index_in(a, b(k)) < 0) merged.push_back(b(k));
  }
  std::sort(merged.begin(), merged.end());
  return Eigen::Map<const Eigen::VectorXd>(merged.data(),
                                           static_cast<Eigen::Index>(merged.size()));
}

double sample_sd(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double mean_of(const std::vector<double>& values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

double tv_distance(const DiscreteDistribution& pi,
                   const DiscreteDistribution& pi_prime) {
  const Eigen::VectorXd grid = union_grid(pi.support(), pi_prime.support());
  return (pi.embedded_in(grid).probs() - pi_prime.embedded_in(grid).probs())
      .cwiseAbs()
      .sum();
}

double distance_d_from_tv(double tv) {
  if (tv <= 0.0) return 0.0;
  if (tv <= std::exp(-1.0)) return -tv * std::log(tv);
  return tv;
}

double distance_d(const DiscreteDistribution& pi,
                  const DiscreteDistribution& pi_prime) {
  return distance_d_from_tv(tv_distance(pi, pi_prime));
}

double product_tv(const DiscreteDistribution& pi,
                  const DiscreteDistribution& pi_prime, int copies) {
  if (pi.size() != pi_prime.size() ||
      (pi.support() - pi_prime.support()).cwiseAbs().maxCoeff() >
          1e-12 * pi.support().cwiseAbs().maxCoeff()) {
    throw Error(ErrorCode::kSupportMismatch,
                "product TV needs both laws on the same grid");
  }
  return (product_measure(pi.probs(), copies) -
          product_measure(pi_prime.probs(), copies))
      .cwiseAbs()
      .sum();
}

double inverse_distance_d(double y) {
  if (y <= 0.0) return 0.0;
  if (y > std::exp(-1.0)) return y;
  // t = exp(-x) with x e^{-x} = y and x >= 1; the left side decreases in x.
  double lo = 1.0;
  double hi = 2.0 * (1.0 - std::log(y)) + 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid * std::exp(-mid) > y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(-0.5 * (lo + hi));
}

LimitPanel::LimitPanel(const DiscreteDistribution& pi_star,
                       const Kernel& kernel, int N, int n, int replicates,
                       std::uint64_t seed, int threads)
    : pi_star_(pi_star), kernel_(kernel), N_(N), n_(n), threads_(threads) {
  if (replicates < 1) {
    throw Error(ErrorCode::kInvalidConfig, "replicates must be >= 1");
  }
  const int q_max = layer_quotient(N, n).first;
  if (q_max < 3) {
    throw Error(ErrorCode::kInvalidConfig,
                "the interior window needs Q_max >= 3 (N = " +
                    std::to_string(N) + " is too small)");
  }
  window_ = q_max - 2;
  seeds_.resize(replicates);
  chains_.resize(replicates);
  for (int r = 0; r < replicates; ++r) {
    seeds_[r] = replicate_seed(seed, static_cast<std::uint64_t>(r));
  }
  parallel_for(chains_.size(), threads_, [&](std::size_t r) {
    const Dataset data = simulate(pi_star_, kernel_, N_, n_, seeds_[r]);
    chains_[r] = std::make_unique<LayerChain<double>>(data, kernel_,
                                                      pi_star_.support());
  });
}

std::vector<double> LimitPanel::interior_log_liks(
    const DiscreteDistribution& pi, int threads) const {
  const Eigen::VectorXd probs = pi.embedded_in(pi_star_.support()).probs();
  std::vector<double> out(chains_.size());
  parallel_for(out.size(), threads, [&](std::size_t r) {
    out[r] = chains_[r]->log_prob_range(probs, 2, window_ + 1);
  });
  return out;
}

std::vector<double> LimitPanel::interior_log_liks(
    const DiscreteDistribution& pi) const {
  return interior_log_liks(pi, threads_);
}

std::vector<double> LimitPanel::evaluate(const DiscreteDistribution& pi,
                                         int threads) const {
  std::vector<double> out = interior_log_liks(pi, threads);
  for (double& v : out) v /= window_;
  return out;
}

std::vector<double> LimitPanel::evaluate(const DiscreteDistribution& pi) const {
  std::vector<double> out = interior_log_liks(pi);
  for (double& v : out) v /= window_;
  return out;
}

bool RiskReport::non_negative_within_error() const {
  return excess_risk >= -3.0 * std_error_excess;
}

LimitEstimate summarize(const std::vector<double>& values) {
  LimitEstimate out;
  out.values = values;
  out.mean = mean_of(values);
  out.std_error =
      sample_sd(values, out.mean) / std::sqrt(static_cast<double>(values.size()));
  return out;
}

LimitEstimate estimate_limit_likelihood(const DiscreteDistribution& pi,
                                        const Kernel& kernel,
                                        const DiscreteDistribution& pi_star,
                                        const RiskParams& params) {
  if (params.N < params.min_N) {
    throw Error(ErrorCode::kInvalidConfig,
                "N = " + std::to_string(params.N) +
                    " is below the configured minimum " +
                    std::to_string(params.min_N));
  }
  const LimitPanel panel(pi_star, kernel, params.N, params.n,
                         params.replicates, params.seed, params.threads);
  return summarize(panel.evaluate(pi));
}

RiskReport excess_risk(const LimitPanel& panel, const DiscreteDistribution& pi) {
  const std::vector<double> star = panel.evaluate(panel.pi_star());
  const std::vector<double> cand = panel.evaluate(pi);
  std::vector<double> diff(star.size());
  for (std::size_t r = 0; r < star.size(); ++r) diff[r] = star[r] - cand[r];
  const LimitEstimate s = summarize(star);
  const LimitEstimate c = summarize(cand);
  const LimitEstimate d = summarize(diff);
  RiskReport report(pi);
  report.L_hat_star = s.mean;
  report.std_error_star = s.std_error;
  report.L_hat_pi = c.mean;
  report.std_error_pi = c.std_error;
  report.excess_risk = d.mean;
  report.std_error_excess = d.std_error;
  report.N_used = panel.num_nodes();
  report.replicates = panel.replicates();
  report.window = panel.window();
  return report;
}

RiskReport excess_risk(const DiscreteDistribution& pi, const Kernel& kernel,
                       const DiscreteDistribution& pi_star,
                       const RiskParams& params) {
  if (params.N < params.min_N) {
    throw Error(ErrorCode::kInvalidConfig,
                "N = " + std::to_string(params.N) +
                    " is below the configured minimum " +
                    std::to_string(params.min_N));
  }
  const LimitPanel panel(pi_star, kernel, params.N, params.n,
                         params.replicates, params.seed, params.threads);
  return excess_risk(panel, pi);
}

double theorem2_rhs(int n, double epsilon, double N, double entropy_integral,
                    double t) {
  return n * std::exp(-6.0 * n * n * std::log(epsilon)) / std::sqrt(N) *
         (entropy_integral + t);
}

double simplex_entropy_integral(int s, int resolution) {
  if (s < 1 || resolution < 1) {
    throw Error(ErrorCode::kInvalidConfig,
                "need s >= 1 and a positive resolution");
  }
  if (s == 1) return 0.0;
  const double h = 1.0 / resolution;
  double total = 0.0;
  for (int k = 0; k < resolution; ++k) {
    const double u = (k + 0.5) * h;
    const double radius = inverse_distance_d(2.0 * u * u);
    const double log_cover = (s - 1) * std::log1p(4.0 / radius);
    total += std::sqrt(log_cover) * 4.0 * u * h;
  }
  return total;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "quantile of an empty sample");
  }
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ScalingTable scaling_experiment(const DiscreteDistribution& pi_star,
                                const Kernel& kernel,
                                const ScalingParams& params) {
  for (int N : params.N_list) {
    if (N % 2 != 0 || N <= 4 * params.n) {
      throw Error(ErrorCode::kInvalidDimensions,
                  "every N must be even and > 4n (got " + std::to_string(N) +
                      ")");
    }
  }
  ScalingTable table;
  table.epsilon = epsilon_floor(kernel, pi_star.support()).epsilon;
  table.entropy_integral = simplex_entropy_integral(
      static_cast<int>(pi_star.size()), params.quadrature_resolution);

  const LimitPanel panel(pi_star, kernel, params.eval_N, params.n,
                         params.eval_replicates,
                         replicate_seed(params.seed, ~std::uint64_t{0}),
                         params.threads);
  const std::vector<double> star = panel.evaluate(pi_star);
  const double star_mean = mean_of(star);

  FitConfig fit = params.fit;
  fit.mode = FitMode::kEm;
  fit.support = pi_star.support();
  fit.threads = 1;

  for (int N : params.N_list) {
    ScalingRow row;
    row.N = N;
    row.excess.resize(params.seeds);
    row.estimates.resize(params.seeds);
    const std::uint64_t base =
        replicate_seed(params.seed, static_cast<std::uint64_t>(N));
    parallel_for(static_cast<std::size_t>(params.seeds), params.threads,
                 [&](std::size_t k) {
                   const Dataset data = simulate(
                       pi_star, kernel, N, params.n, replicate_seed(base, k));
                   const FitResult fitted = fit_mle(data, kernel, fit);
                   row.estimates[k] = to_std(fitted.pi_hat.probs());
                   row.excess[k] =
                       star_mean - mean_of(panel.evaluate(fitted.pi_hat, 1));
                 });
    row.median_excess = quantile(row.excess, 0.5);
    row.iqr = quantile(row.excess, 0.75) - quantile(row.excess, 0.25);
    row.rhs = theorem2_rhs(params.n, table.epsilon, N, table.entropy_integral,
                           params.t);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<ZSummary> z_process_concentration(
    const std::vector<DiscreteDistribution>& pi_list, const Kernel& kernel,
    const DiscreteDistribution& pi_star, const ZParams& params) {
  if (pi_list.empty()) {
    throw Error(ErrorCode::kNoCandidates, "z process needs at least one law");
  }
  const LimitPanel panel(pi_star, kernel, params.N, params.n,
                         params.replicates, params.seed, params.threads);
  const double root_q = std::sqrt(static_cast<double>(panel.window()));
  std::vector<std::vector<double>> scaled;
  std::vector<ZSummary> out;
  for (const auto& pi : pi_list) {
    const std::vector<double> s = panel.interior_log_liks(pi);
    const double mean = mean_of(s);
    std::vector<double> z(s.size());
    for (std::size_t r = 0; r < s.size(); ++r) z[r] = (s[r] - mean) / root_q;

    ZSummary summary(pi);
    summary.mean_per_layer = mean / panel.window();
    summary.sd = sample_sd(z, 0.0);
    for (int t = 1; t <= 3; ++t) {
      const double level = t * std::sqrt(2.0) * summary.sd;
      const auto hits = std::count_if(z.begin(), z.end(), [&](double v) {
        return summary.sd > 0.0 && std::abs(v) > level;
      });
      summary.exceedance[t - 1] =
          static_cast<double>(hits) / static_cast<double>(z.size());
      summary.envelope[t - 1] = 2.0 * std::exp(-static_cast<double>(t * t));
    }
    if (!scaled.empty()) {
      std::vector<double> inc(z.size());
      for (std::size_t r = 0; r < z.size(); ++r) inc[r] = z[r] - scaled[0][r];
      summary.increment_sd = sample_sd(inc, mean_of(inc));
      summary.distance_to_first = distance_d(pi, pi_list.front());
    }
    scaled.push_back(std::move(z));
    out.push_back(std::move(summary));
  }
  return out;
}

void write_scaling_csv(const ScalingTable& table, std::ostream& out) {
  const auto old_precision = out.precision(12);
  out << "N,median_excess,iqr,rhs\n";
  for (const auto& row : table.rows) {
    out << row.N << ',' << row.median_excess << ',' << row.iqr << ','
        << row.rhs << '\n';
  }
  out.precision(old_precision);
}

nlohmann::json scaling_to_json(const ScalingTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"N", row.N},
                    {"median_excess", row.median_excess},
                    {"iqr", row.iqr},
                    {"rhs", row.rhs},
                    {"excess", row.excess},
                    {"estimates", row.estimates}});
  }
  return {{"epsilon", table.epsilon},
          {"entropy_integral", table.entropy_integral},
          {"rows", rows}};
}

nlohmann::json risk_report_to_json(const RiskReport& report) {
  return {{"pi", distribution_to_json(report.pi)},
          {"L_hat_star", report.L_hat_star},
          {"stderr_star", report.std_error_star},
          {"L_hat_pi", report.L_hat_pi},
          {"stderr_pi", report.std_error_pi},
          {"excess_risk", report.excess_risk},
          {"stderr_excess", report.std_error_excess},
          {"non_negative_within_3se", report.non_negative_within_error()},
          {"N_used", report.N_used},
          {"replicates", report.replicates},
          {"window", report.window}};
}

nlohmann::json z_summaries_to_json(const std::vector<ZSummary>& summaries) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& z : summaries) {
    out.push_back({{"pi", distribution_to_json(z.pi)},
                   {"mean_per_layer", z.mean_per_layer},
                   {"sd", z.sd},
                   {"exceedance", z.exceedance},
                   {"envelope", z.envelope},
                   {"distance_to_first", z.distance_to_first},
                   {"increment_sd", z.increment_sd}});
  }
  return out;
}

}  // namespace lgmle
