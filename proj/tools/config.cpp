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

#include "config.hpp"

#include <fstream>

#include "lgmle/error.hpp"

namespace lgmle::cli {
namespace {

const nlohmann::json& defaults() {
  static const nlohmann::json d = nlohmann::json::parse(R"({
    "seed": 0,
    "threads": 1,
    "model": {
      "kernel": {"variant": "bradley_terry"},
      "support": [1.0, 3.0],
      "pi_star": [0.5, 0.5],
      "pi": null
    },
    "graph": {"N": 200, "n": 3},
    "data": null,
    "fit": {
      "mode": "em",
      "init": "uniform",
      "explicit_inits": [],
      "max_iters": 500,
      "tol": 1e-10,
      "restarts": 1,
      "candidates": []
    },
    "analysis": {
      "replicates": 20,
      "N_large": 2000,
      "min_N": 100,
      "candidates": [],
      "q": 2,
      "horizon": 6
    },
    "io": {"out": "."}
  })");
  return d;
}

Eigen::VectorXd vector_of(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kInvalidConfig, std::string(what) + " must be an array");
  }
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

DiscreteDistribution law_on(const Eigen::VectorXd& support,
                            const nlohmann::json& probs, const char* what) {
  const Eigen::VectorXd p = vector_of(probs, what);
  if (p.size() != support.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string(what) + " must have one weight per support point");
  }
  return DiscreteDistribution(support, p);
}

FitConfig fit_config_of(const nlohmann::json& j, const Eigen::VectorXd& support,
                        std::uint64_t seed, int threads) {
  FitConfig fit;
  fit.support = support;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "em") {
    fit.mode = FitMode::kEm;
  } else if (mode == "grid") {
    fit.mode = FitMode::kGrid;
  } else {
    throw Error(ErrorCode::kInvalidConfig, "fit.mode must be \"em\" or \"grid\"");
  }
  const std::string init = j.at("init").get<std::string>();
  if (init == "uniform") {
    fit.init = InitMode::kUniform;
  } else if (init == "random") {
    fit.init = InitMode::kRandom;
  } else if (init == "explicit") {
    fit.init = InitMode::kExplicit;
  } else {
    throw Error(ErrorCode::kInvalidConfig,
                "fit.init must be \"uniform\", \"random\" or \"explicit\"");
  }
  for (const auto& w : j.at("explicit_inits")) {
    fit.explicit_inits.push_back(vector_of(w, "fit.explicit_inits[]"));
  }
  fit.max_iters = j.at("max_iters").get<int>();
  fit.tol = j.at("tol").get<double>();
  fit.restarts = j.at("restarts").get<int>();
  for (const auto& c : j.at("candidates")) {
    fit.candidates.push_back(law_on(support, c, "fit.candidates[]"));
  }
  fit.seed = seed;
  fit.threads = threads;
  return fit;
}

}  // namespace

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kInvalidConfig,
                "malformed JSON in " + path + ": " + e.what());
  }
}

nlohmann::json resolve_config(const Overrides& overrides) {
  nlohmann::json config = defaults();
  if (overrides.config_path) {
    const nlohmann::json file = read_json_file(*overrides.config_path);
    if (!file.is_object()) {
      throw Error(ErrorCode::kInvalidConfig, "config must be a JSON object");
    }
    config.merge_patch(file);
    // merge_patch drops null members; keep the documented keys present.
    for (const char* key : {"data"}) {
      if (!config.contains(key)) config[key] = nullptr;
    }
    if (!config["model"].contains("pi")) config["model"]["pi"] = nullptr;
  }
  if (overrides.seed) config["seed"] = *overrides.seed;
  if (overrides.threads) config["threads"] = *overrides.threads;
  if (overrides.out) config["io"]["out"] = *overrides.out;
  if (overrides.N) config["graph"]["N"] = *overrides.N;
  if (overrides.n) config["graph"]["n"] = *overrides.n;
  if (config["model"]["pi"].is_null()) {
    config["model"]["pi"] = config["model"]["pi_star"];
  }
  return config;
}

ExperimentConfig::ExperimentConfig(const nlohmann::json& r)
    : resolved(r),
      seed(r.at("seed").get<std::uint64_t>()),
      threads(r.at("threads").get<int>()),
      out(r.at("io").at("out").get<std::string>()),
      support(vector_of(r.at("model").at("support"), "model.support")),
      kernel(kernel_from_json(r.at("model").at("kernel"), support)),
      pi_star(law_on(support, r.at("model").at("pi_star"), "model.pi_star")),
      pi(law_on(support, r.at("model").at("pi"), "model.pi")),
      N(r.at("graph").at("N").get<int>()),
      n(r.at("graph").at("n").get<int>()),
      fit(fit_config_of(r.at("fit"), support, seed, threads)) {
  if (!r.at("data").is_null()) data_path = r.at("data").get<std::string>();
  for (const auto& c : r.at("analysis").at("candidates")) {
    risk_candidates.push_back(law_on(support, c, "analysis.candidates[]"));
  }
}

}  // namespace lgmle::cli
