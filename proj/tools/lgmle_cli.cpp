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

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "lgmle/error.hpp"

namespace {

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("lgmle");
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("LGMLE_LOG")) {
    logger->set_level(spdlog::level::from_str(env));
  }
  spdlog::set_default_logger(logger);
}

void add_common_options(CLI::App* cmd, lgmle::cli::Overrides& o) {
  cmd->add_option_function<std::string>(
      "--config", [&o](const std::string& v) { o.config_path = v; },
      "JSON experiment config");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&o](std::uint64_t v) { o.seed = v; }, "base RNG seed");
  cmd->add_option_function<std::string>(
      "--out", [&o](const std::string& v) { o.out = v; },
      "output directory (or a .csv file for schedule)");
  cmd->add_option_function<int>(
      "--threads", [&o](int v) { o.threads = v; },
      "worker threads for replicates (0 = all cores)");
  cmd->add_option_function<int>("--N", [&o](int v) { o.N = v; },
                                "number of nodes");
  cmd->add_option_function<int>("--n", [&o](int v) { o.n = v; },
                                "number of rounds");
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Layer-chain likelihood tools for sparse round-robin data"};
  app.require_subcommand(1);

  lgmle::cli::Overrides overrides;
  bool verify_lemma1 = false;
  auto* schedule = app.add_subcommand("schedule", "build the graph and layers");
  schedule->add_flag("--verify-lemma1", verify_lemma1,
                     "compare closed-form layers with BFS layers");
  auto* simulate = app.add_subcommand("simulate", "draw a dataset");
  auto* loglik = app.add_subcommand("loglik", "exact log-likelihood");
  auto* fit = app.add_subcommand("fit", "maximum likelihood fit");
  auto* risk = app.add_subcommand("risk", "excess risk estimates");
  auto* diagnose = app.add_subcommand("diagnose", "forgetting diagnostics");
  for (auto* cmd : {schedule, simulate, loglik, fit, risk, diagnose}) {
    add_common_options(cmd, overrides);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*schedule) return lgmle::cli::cmd_schedule(overrides, verify_lemma1);
    if (*simulate) return lgmle::cli::cmd_simulate(overrides);
    if (*loglik) return lgmle::cli::cmd_loglik(overrides);
    if (*fit) return lgmle::cli::cmd_fit(overrides);
    if (*risk) return lgmle::cli::cmd_risk(overrides);
    if (*diagnose) return lgmle::cli::cmd_diagnose(overrides);
  } catch (const lgmle::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_validation() ? 2 : 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: InvalidConfig: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
