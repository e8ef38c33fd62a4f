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

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lgmle/error.hpp"
#include "lgmle/likelihood.hpp"
#include "oracles.hpp"

using lgmle::DiscreteDistribution;
using lgmle::ErrorCode;
using lgmle::Kernel;
using lgmle::LayerChain;
using namespace lgmle::testing;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(values.size());
  Eigen::Index k = 0;
  for (double x : values) v(k++) = x;
  return v;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const lgmle::Error& e) {
    return e.code();
  }
  FAIL("expected an lgmle::Error");
  return ErrorCode::kIo;
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

}  // namespace

TEST_CASE("uniform kernel likelihood ignores the prior") {
  const auto support = vec({1, 2, 4});
  const Kernel u = Kernel::uniform({-1, 0, 1}, support);
  const auto d = lgmle::simulate(DiscreteDistribution::uniform(support), u, 40, 3, 2);
  std::mt19937_64 gen(1);
  for (int t = 0; t < 5; ++t) {
    const auto pi = random_law(gen, support);
    CHECK(lgmle::log_likelihood(d, pi, u) ==
          doctest::Approx(d.outcomes.size() * std::log(1.0 / 3.0)).epsilon(1e-12));
  }
}

TEST_CASE("point mass prior reduces to a product") {
  const Kernel bt = Kernel::bradley_terry();
  const auto pi = DiscreteDistribution::point_mass(1.5);
  const auto d = lgmle::simulate(pi, bt, 30, 3, 4);
  double expected = 0.0;
  for (int x : d.outcomes) expected += std::log(lgmle::kernel_prob(bt, x, 1.5, 1.5));
  CHECK(lgmle::log_likelihood(d, pi, bt) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("elimination matches enumeration on N = 8, n = 2") {
  const auto pi = DiscreteDistribution::uniform(vec({1, 3}));
  const Kernel bt = Kernel::bradley_terry();
  const auto d = small_dataset(8, 2, pi, bt, 17);
  CHECK(close_rel(lgmle::log_likelihood(d, pi, bt),
                  lgmle::brute_force_log_likelihood(d, pi, bt), 1e-10));
}

TEST_CASE("two-node instance") {
  const auto support = vec({1, 3});
  const auto pi = DiscreteDistribution(support, vec({0.3, 0.7}));
  const Kernel bt = Kernel::bradley_terry();
  const auto d = small_dataset(2, 1, pi, bt, 3);
  const int x = d.outcomes[0];
  double total = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      total += pi.probs()(a) * pi.probs()(b) *
               lgmle::kernel_prob(bt, x, support(a), support(b));
    }
  }
  CHECK(lgmle::brute_force_log_likelihood(d, pi, bt) ==
        doctest::Approx(std::log(total)));
  CHECK(lgmle::log_likelihood(d, pi, bt) == doctest::Approx(std::log(total)));
  const auto mass = DiscreteDistribution::point_mass(3.0);
  CHECK(lgmle::brute_force_log_likelihood(d, mass, bt) ==
        doctest::Approx(std::log(lgmle::kernel_prob(bt, x, 3, 3))));
}

TEST_CASE("elimination matches enumeration on random small instances") {
  std::mt19937_64 gen(2024);
  const int sizes[] = {6, 8, 10, 12};
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int N = sizes[trial % 4];
    const int s = 1 + (trial / 4) % 3;
    const Eigen::VectorXd support = random_support(gen, s);
    const Kernel k = kernel_variant(trial, gen, support);
    const auto pi = random_law(gen, support);
    const auto d = small_dataset(N, 2, pi, k, trial);
    const double fast = lgmle::log_likelihood(d, pi, k);
    const double slow = lgmle::brute_force_log_likelihood(d, pi, k);
    CAPTURE(trial);
    CHECK(close_rel(fast, slow, 1e-10));
    const LayerChain<long double> wide(d, k, support);
    CHECK(close_rel(static_cast<double>(wide.log_likelihood(pi.probs().cast<long double>())),
                    slow, 1e-10));
    ++checked;
  }
  CHECK(checked >= 50);
}

TEST_CASE("brute force refuses large instances") {
  const auto pi = DiscreteDistribution::uniform(vec({1, 2, 3}));
  const auto d = lgmle::simulate(pi, Kernel::bradley_terry(), 14, 3, 1);
  CHECK(code_of([&] {
          lgmle::brute_force_log_likelihood(d, pi, Kernel::bradley_terry());
        }) == ErrorCode::kTooLargeForBruteForce);
}

TEST_CASE("prior and kernel grids must agree") {
  const auto pi = DiscreteDistribution::uniform(vec({1, 2}));
  const Kernel table = Kernel::uniform({0, 1}, vec({1, 3}));
  const auto d = lgmle::simulate(pi, Kernel::bradley_terry(), 20, 3, 1);
  CHECK(code_of([&] { lgmle::log_likelihood(d, pi, table); }) ==
        ErrorCode::kSupportMismatch);
  std::vector<Eigen::MatrixXd> zero(2, Eigen::MatrixXd(2, 2));
  zero[0] << 0.0, 0.5, 0.5, 0.5;
  zero[1] << 1.0, 0.5, 0.5, 0.5;
  const Kernel holes = Kernel::custom_table({0, 1}, vec({1, 2}), zero);
  CHECK(code_of([&] { lgmle::log_likelihood(d, pi, holes); }) ==
        ErrorCode::kH1Violated);
}

TEST_CASE("cached and recomputed factors agree") {
  const auto support = vec({1, 2, 5});
  const auto pi = DiscreteDistribution(support, vec({0.2, 0.5, 0.3}));
  const Kernel k = Kernel::ties(2.0);
  const auto d = lgmle::simulate(pi, k, 60, 3, 12);
  const LayerChain<double> cached(d, k, support);
  const LayerChain<double> fresh(d, k, support, 0);
  CHECK(cached.log_likelihood(pi.probs()) ==
        doctest::Approx(fresh.log_likelihood(pi.probs())).epsilon(1e-14));
  double total = 0.0;
  for (double c : lgmle::layer_log_normalizers(d, pi, k)) total += c;
  CHECK(total == doctest::Approx(lgmle::log_likelihood(d, pi, k)).epsilon(1e-13));
}

TEST_CASE("conditional probability under the uniform kernel") {
  const auto support = vec({1, 3});
  const Kernel u = Kernel::uniform({0, 1}, support);
  const auto pi = DiscreteDistribution::uniform(support);
  const auto d = lgmle::simulate(pi, u, 40, 3, 6);
  const int q_max = d.layers.q_max;
  for (int m = 2; m <= q_max - 1; ++m) {
    CHECK(lgmle::conditional_log_prob(d, pi, u, 2, m) ==
          doctest::Approx(6 * std::log(0.5)));
  }
}

TEST_CASE("conditional at q = m matches two-block enumeration") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd support = random_support(gen, 2 + trial % 2);
    const Kernel k = kernel_variant(trial, gen, support);
    const auto pi = random_law(gen, support);
    const auto d = lgmle::simulate(pi, k, 30, 2 + trial % 2, trial);
    for (int q = 2; q <= d.layers.q_max - 1; ++q) {
      CHECK(lgmle::conditional_log_prob(d, pi, k, q, q) ==
            doctest::Approx(two_block_log_prob(d, pi, k, q)).epsilon(1e-11));
    }
  }
}

TEST_CASE("conditional range checks") {
  const auto pi = DiscreteDistribution::uniform(vec({1, 3}));
  const Kernel bt = Kernel::bradley_terry();
  const auto d = lgmle::simulate(pi, bt, 40, 3, 6);
  const int q_max = d.layers.q_max;
  CHECK(code_of([&] { lgmle::conditional_log_prob(d, pi, bt, 1, 3); }) ==
        ErrorCode::kLayerOutOfRange);
  CHECK(code_of([&] { lgmle::conditional_log_prob(d, pi, bt, 4, 3); }) ==
        ErrorCode::kLayerOutOfRange);
  CHECK(code_of([&] { lgmle::conditional_log_prob(d, pi, bt, 2, q_max); }) ==
        ErrorCode::kLayerOutOfRange);
}

TEST_CASE("conditional bounds and forgetting") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial % 2;
    const Eigen::VectorXd support = random_support(gen, 2 + trial / 3);
    const Kernel k = kernel_variant(trial, gen, support);
    const auto pi = random_law(gen, support);
    const auto d = lgmle::simulate(pi, k, 48, n, trial);
    const double log_eps = std::log(lgmle::epsilon_floor(k, support).epsilon);
    const double nu = std::exp(n * (n - 1) * log_eps);
    const int top = d.layers.q_max - 1;
    for (int q = 2; q <= top; ++q) {
      for (int m = q; m <= top; ++m) {
        const double c = lgmle::conditional_log_prob(d, pi, k, q, m);
        CHECK(c <= 1e-12);
        CHECK(std::abs(c) <= n * (n - 1) * -log_eps + 1e-9);
        for (int l = 1; m + l <= top; ++l) {
          const double gap =
              std::abs(c - lgmle::conditional_log_prob(d, pi, k, q, m + l));
          CHECK(gap <= std::pow(1 - nu, std::max(m - q - 1, 0)) / nu);
        }
      }
    }
  }
}

TEST_CASE("posterior marginals") {
  SUBCASE("uniform kernel returns the prior") {
    const auto support = vec({1, 2, 3});
    const Kernel u = Kernel::uniform({0, 1}, support);
    const auto pi = DiscreteDistribution(support, vec({0.2, 0.3, 0.5}));
    const auto d = lgmle::simulate(pi, u, 30, 3, 1);
    const Eigen::MatrixXd post = lgmle::posterior_node_marginals(d, pi, u);
    for (Eigen::Index i = 0; i < post.rows(); ++i) {
      CHECK((post.row(i).transpose() - pi.probs()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("point mass stays put") {
    const auto pi = DiscreteDistribution::point_mass(2.0);
    const auto d = lgmle::simulate(pi, Kernel::degree_model(), 20, 3, 1);
    const Eigen::MatrixXd post =
        lgmle::posterior_node_marginals(d, pi, Kernel::degree_model());
    CHECK((post.array() - 1.0).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("enumeration oracle") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 20; ++trial) {
      const int N = trial % 2 == 0 ? 8 : 10;
      const Eigen::VectorXd support = random_support(gen, 2 + trial % 2);
      const Kernel k = kernel_variant(trial, gen, support);
      const auto pi = random_law(gen, support);
      const auto d = small_dataset(N, 2, pi, k, trial);
      const Eigen::MatrixXd fast = lgmle::posterior_node_marginals(d, pi, k);
      const Eigen::MatrixXd slow = brute_force_marginals(d, pi, k);
      CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((fast.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("marginals follow a relabeling of the support") {
  std::mt19937_64 gen(4);
  const Eigen::VectorXd support = vec({1, 2, 3});
  const Kernel k = random_table_kernel(gen, support, 2);
  const auto pi = DiscreteDistribution(support, vec({0.5, 0.3, 0.2}));
  const auto d = lgmle::simulate(pi, k, 20, 3, 5);
  // Reverse the role of the grid points in both the prior and the table.
  std::vector<Eigen::MatrixXd> flipped;
  for (const auto& slice : k.table()) {
    flipped.push_back(slice.colwise().reverse().rowwise().reverse());
  }
  const Kernel k2 = Kernel::custom_table(k.outcomes(), support, flipped);
  const auto pi2 = DiscreteDistribution(support, pi.probs().reverse());
  const Eigen::MatrixXd a = lgmle::posterior_node_marginals(d, pi, k);
  const Eigen::MatrixXd b = lgmle::posterior_node_marginals(d, pi2, k2);
  CHECK((a - b.rowwise().reverse()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(lgmle::log_likelihood(d, pi, k) ==
        doctest::Approx(lgmle::log_likelihood(d, pi2, k2)).epsilon(1e-13));
}

TEST_CASE("backward messages are normalized") {
  const auto support = vec({1, 3});
  const auto pi = DiscreteDistribution(support, vec({0.4, 0.6}));
  const Kernel bt = Kernel::bradley_terry();
  const auto d = lgmle::simulate(pi, bt, 40, 3, 3);
  const auto msgs = lgmle::backward_messages(d, pi, bt);
  REQUIRE(msgs.log_messages.size() == d.layers.node_layers.size());
  for (const auto& m : msgs.log_messages) {
    CHECK(std::abs(m.array().exp().sum() - 1.0) < 1e-10);
  }
  // Contracting the first message with the prior of V_0 recovers the total.
  const LayerChain<double> chain(d, bt, support);
  double total = 0.0;
  for (double c : msgs.log_norms) total += c;
  total += std::log((chain.block_prior(pi.probs(), 0).array() *
                     msgs.log_messages[0].array().exp())
                        .sum());
  CHECK(total == doctest::Approx(lgmle::log_likelihood(d, pi, bt)).epsilon(1e-12));
}

TEST_CASE("backward contraction") {
  const auto support = vec({1, 3});
  const auto pi = DiscreteDistribution(support, vec({0.4, 0.6}));
  SUBCASE("identical starting laws stay identical") {
    const Kernel bt = Kernel::bradley_terry();
    const auto d = lgmle::simulate(pi, bt, 40, 3, 3);
    const LayerChain<double> chain(d, bt, support);
    const int m = d.layers.q_max - 1;
    const Eigen::VectorXd mu =
        Eigen::VectorXd::Constant(chain.block_states(m + 1),
                                  1.0 / chain.block_states(m + 1));
    const auto profile = chain.contraction(pi.probs(), 2, m, mu, mu);
    for (const auto& step : profile.steps) CHECK(step.tv == 0.0);
  }
  SUBCASE("uniform kernel forgets in one step") {
    const Kernel u = Kernel::uniform({0, 1}, support);
    const auto d = lgmle::simulate(pi, u, 40, 3, 3);
    const auto profile =
        lgmle::backward_contraction_profile(d, pi, u, 2, d.layers.q_max - 1);
    REQUIRE_FALSE(profile.steps.empty());
    CHECK(profile.steps.front().previous_tv == doctest::Approx(2.0));
    for (const auto& step : profile.steps) CHECK(step.tv < 1e-14);
  }
  SUBCASE("Bradley-Terry stays below the envelope") {
    const Kernel bt = Kernel::bradley_terry();
    for (int n : {2, 3}) {
      const auto d = lgmle::simulate(pi, bt, 60, n, 9);
      const auto profile =
          lgmle::backward_contraction_profile(d, pi, bt, 2, d.layers.q_max - 1);
      for (const auto& step : profile.steps) {
        CHECK(step.tv <= step.step_bound + 1e-14);
        CHECK(step.tv <= step.cumulative_bound + 1e-14);
        CHECK(step.dobrushin <= 1.0 - step.nu + 1e-12);
        CHECK(step.tv <= step.dobrushin * step.previous_tv + 1e-12);
      }
    }
  }
}

TEST_CASE("interior factors carry n(n - 1) edges") {
  const auto pi = DiscreteDistribution::uniform(vec({1, 3}));
  const auto d = lgmle::simulate(pi, Kernel::bradley_terry(), 100, 3, 2);
  const LayerChain<double> chain(d, Kernel::bradley_terry(), pi.support());
  for (int q = 2; q <= d.layers.q_max - 1; ++q) CHECK(chain.factor_size(q) == 6);
  const auto f = chain.factor(3);
  CHECK(f.kernel.rows() == 16);
  CHECK(f.kernel.maxCoeff() == doctest::Approx(1.0));
  CHECK(f.kernel.minCoeff() * std::exp(-f.log_shift) >=
        std::pow(0.25, 6) * (1 - 1e-12));
}

TEST_CASE("log normalizer CSV") {
  std::ostringstream out;
  lgmle::write_log_normalizers_csv({-1.5, -2.0}, out);
  CHECK(out.str() == "layer,log_norm\n0,-1.5\n1,-2\n");
}
