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

#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lgmle/analysis.hpp"
#include "lgmle/error.hpp"
#include "lgmle/likelihood.hpp"
#include "lgmle/rng.hpp"
#include "lgmle/rr_graph.hpp"
#include "lgmle/simulator.hpp"

namespace lgmle::cli {
namespace fs = std::filesystem;
namespace {

nlohmann::json seed_manifest(std::uint64_t seed) {
  return {{"seed", seed},
          {"streams",
           {{"weights", static_cast<int>(Stream::kWeights)},
            {"outcomes", static_cast<int>(Stream::kOutcomes)},
            {"init", static_cast<int>(Stream::kInit)},
            {"replicate", static_cast<int>(Stream::kReplicate)}}},
          {"rng", "mt19937_64 seeded by seed_seq(seed, stream, substream)"}};
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
  spdlog::info("wrote {}", path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  write_file(path, j.dump(2) + "\n");
}

// Output locations: a path ending in `.csv` names the main CSV file and its
// siblings share the stem; anything else is a directory.
struct OutputPaths {
  fs::path base;
  bool single_file = false;

  fs::path csv(const std::string& name) const {
    return single_file ? base : base / (name + ".csv");
  }
  fs::path json(const std::string& name) const {
    if (!single_file) return base / (name + ".json");
    fs::path p = base;
    return p.replace_extension("." + name + ".json");
  }
};

OutputPaths output_paths(const std::string& out) {
  OutputPaths paths;
  paths.base = out.empty() ? fs::path(".") : fs::path(out);
  paths.single_file = paths.base.extension() == ".csv";
  return paths;
}

nlohmann::json envelope(const ExperimentConfig& config) {
  return {{"config", config.resolved}, {"seeds", seed_manifest(config.seed)}};
}

Dataset load_or_simulate(const ExperimentConfig& config,
                         nlohmann::json& source) {
  if (config.data_path) {
    source = {{"kind", "file"}, {"path", *config.data_path}};
    return dataset_from_json(read_json_file(*config.data_path));
  }
  source = {{"kind", "simulated"}, {"seed", config.seed}};
  return simulate(config.pi_star, config.kernel, config.N, config.n,
                  config.seed);
}

std::string to_csv_number(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

int cmd_schedule(const Overrides& overrides, bool verify_lemma1) {
  const ExperimentConfig config(resolve_config(overrides));
  const RoundRobinGraph graph = build_schedule(config.N, config.n);
  const LayerStructure layers = layer_decomposition(graph);
  const OutputPaths paths = output_paths(config.out);

  std::ostringstream csv;
  write_graph_csv(graph, csv);
  write_file(paths.csv("graph"), csv.str());
  nlohmann::json layer_json = layers_to_json(layers);
  layer_json["config"] = config.resolved;
  write_json(paths.json("layers"), layer_json);

  if (verify_lemma1) {
    const LayerStructure predicted = predicted_layers(config.N, config.n);
    if (!(predicted == layers)) {
      spdlog::error("closed-form layers differ from BFS layers for N={} n={}",
                    config.N, config.n);
      std::cout << "lemma1: mismatch\n";
      return 1;
    }
    std::cout << "lemma1: ok (N=" << config.N << ", n=" << config.n
              << ", Q_max=" << layers.q_max << ", r=" << layers.remainder
              << ", depth=" << layers.depth() << ")\n";
  }
  return 0;
}

int cmd_simulate(const Overrides& overrides) {
  const ExperimentConfig config(resolve_config(overrides));
  const Dataset data = simulate(config.pi_star, config.kernel, config.N,
                                config.n, config.seed);
  const OutputPaths paths = output_paths(config.out);
  std::ostringstream csv;
  write_outcomes_csv(data, csv);
  write_file(paths.csv("outcomes"), csv.str());
  nlohmann::json j = dataset_to_json(data);
  j.update(envelope(config));
  write_json(paths.json("dataset"), j);
  return 0;
}

int cmd_loglik(const Overrides& overrides) {
  const ExperimentConfig config(resolve_config(overrides));
  nlohmann::json source;
  const Dataset data = load_or_simulate(config, source);
  const LayerChain<double> chain(data, config.kernel, config.pi.support());
  const std::vector<double> norms =
      chain.layer_log_normalizers(config.pi.probs());
  double total = 0.0;
  for (double c : norms) total += c;

  const OutputPaths paths = output_paths(config.out);
  std::ostringstream csv;
  write_log_normalizers_csv(norms, csv);
  write_file(paths.csv("log_norms"), csv.str());
  nlohmann::json j = envelope(config);
  j["data"] = source;
  j["log_likelihood"] = total;
  j["q_max"] = data.layers.q_max;
  j["normalized_log_likelihood"] =
      data.layers.q_max > 0 ? total / data.layers.q_max : total;
  j["num_edges"] = data.graph.edges().size();
  write_json(paths.json("loglik"), j);
  std::cout << to_csv_number(total) << "\n";
  return 0;
}

int cmd_fit(const Overrides& overrides) {
  const ExperimentConfig config(resolve_config(overrides));
  nlohmann::json source;
  const Dataset data = load_or_simulate(config, source);
  const FitResult result = fit_mle(data, config.kernel, config.fit);
  nlohmann::json j = envelope(config);
  j["data"] = source;
  j["result"] = fit_result_to_json(result);
  write_json(output_paths(config.out).json("fit"), j);
  return 0;
}

int cmd_risk(const Overrides& overrides) {
  const ExperimentConfig config(resolve_config(overrides));
  const auto& analysis = config.resolved.at("analysis");
  RiskParams params;
  params.N = analysis.at("N_large").get<int>();
  params.n = config.n;
  params.replicates = analysis.at("replicates").get<int>();
  params.min_N = analysis.at("min_N").get<int>();
  params.seed = config.seed;
  params.threads = config.threads;
  if (params.N < params.min_N) {
    throw Error(ErrorCode::kInvalidConfig,
                "analysis.N_large must be >= analysis.min_N");
  }
  std::vector<DiscreteDistribution> candidates = config.risk_candidates;
  if (candidates.empty()) candidates.push_back(config.pi);

  const LimitPanel panel(config.pi_star, config.kernel, params.N, params.n,
                         params.replicates, params.seed, params.threads);
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& pi : candidates) {
    const RiskReport report = excess_risk(panel, pi);
    reports.push_back(risk_report_to_json(report));
    spdlog::info("excess risk {:.6g} (se {:.3g})", report.excess_risk,
                 report.std_error_excess);
  }
  nlohmann::json j = envelope(config);
  j["seeds"]["replicate_seeds"] = panel.seeds();
  j["reports"] = reports;
  write_json(output_paths(config.out).json("risk"), j);
  return 0;
}

int cmd_diagnose(const Overrides& overrides) {
  const ExperimentConfig config(resolve_config(overrides));
  nlohmann::json source;
  const Dataset data = load_or_simulate(config, source);
  const auto& analysis = config.resolved.at("analysis");
  const int q_max = data.layers.q_max;
  const int q = analysis.at("q").get<int>();
  const int m = analysis.contains("m") ? analysis.at("m").get<int>() : q_max - 1;
  const int horizon = analysis.at("horizon").get<int>();
  check_conditional_range(data.layers, q, m);

  const LayerChain<double> chain(data, config.kernel, config.pi.support());
  const Eigen::VectorXd& probs = config.pi.probs();
  const ContractionProfile profile = backward_contraction_profile(
      data, config.pi, config.kernel, q, m);

  const OutputPaths paths = output_paths(config.out);
  int contraction_violations = 0;
  std::ostringstream contraction;
  contraction << "layer,tv,bound,cumulative_bound,nu,dobrushin\n";
  for (const auto& step : profile.steps) {
    if (step.tv > step.step_bound * (1 + 1e-12) + 1e-15) ++contraction_violations;
    contraction << step.layer << ',' << to_csv_number(step.tv) << ','
                << to_csv_number(step.step_bound) << ','
                << to_csv_number(step.cumulative_bound) << ','
                << to_csv_number(step.nu) << ','
                << to_csv_number(step.dobrushin) << '\n';
  }
  write_file(paths.csv("contraction"), contraction.str());

  // Forgetting: |log P(X_q | X_{q+1:m'}) - log P(X_q | X_{q+1:m'+l})| for
  // q <= m' <= m and 1 <= l <= horizon, against nu^{-1} (1 - nu)^{m'-q-1}.
  const double log_eps = std::log(chain.epsilon());
  const double nu = std::exp(config.n * (config.n - 1) * log_eps);
  auto conditional = [&](int a, int b) {
    return chain.log_prob_range(probs, a, b) -
           chain.log_prob_range(probs, a + 1, b);
  };
  int forgetting_violations = 0;
  int loglik_violations = 0;
  std::ostringstream forgetting;
  forgetting << "q,m,l,gap,bound\n";
  for (int mm = q; mm <= std::min(m, q + horizon); ++mm) {
    const double base = conditional(q, mm);
    if (std::abs(base) > chain.factor_size(q) * -log_eps * (1 + 1e-12)) {
      ++loglik_violations;
    }
    for (int l = 1; l <= horizon && mm + l <= q_max - 1; ++l) {
      const double gap = std::abs(base - conditional(q, mm + l));
      const double bound =
          std::exp(-std::log(nu) + std::max(mm - q - 1, 0) * std::log1p(-nu));
      if (gap > bound) ++forgetting_violations;
      forgetting << q << ',' << mm << ',' << l << ',' << to_csv_number(gap)
                 << ',' << to_csv_number(bound) << '\n';
    }
  }
  write_file(paths.csv("forgetting"), forgetting.str());

  nlohmann::json j = envelope(config);
  j["data"] = source;
  j["q"] = q;
  j["m"] = m;
  j["epsilon"] = chain.epsilon();
  j["nu"] = nu;
  j["violations"] = {{"contraction", contraction_violations},
                     {"forgetting", forgetting_violations},
                     {"loglik_bound", loglik_violations}};
  write_json(paths.json("diagnose"), j);
  std::cout << "violations: contraction=" << contraction_violations
            << " forgetting=" << forgetting_violations
            << " loglik_bound=" << loglik_violations << "\n";
  return 0;
}

}  // namespace lgmle::cli
