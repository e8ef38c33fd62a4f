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

#include "lgmle/rng.hpp"

#include <cmath>
#include <numeric>

namespace lgmle {
namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t substream) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  return std::seed_seq{lo(seed),   hi(seed),      lo(stream),
                       hi(stream), lo(substream), hi(substream)};
}

}  // namespace

Rng::Rng(std::uint64_t seed, Stream stream, std::uint64_t substream) {
  auto seq = make_seed_seq(seed, static_cast<std::uint64_t>(stream), substream);
  engine_.seed(seq);
}

std::size_t Rng::categorical(std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double u = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    acc += weights[k];
    last_positive = k;
    if (u < acc) return k;
  }
  // Rounding left u at or past the accumulated total.
  return last_positive;
}

double Rng::exponential() {
  // 1 - U lies in (0, 1], so the log is finite.
  return -std::log1p(-uniform());
}

std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t index) {
  Rng rng(base_seed, Stream::kReplicate, index);
  return rng.next_u64();
}

}  // namespace lgmle
