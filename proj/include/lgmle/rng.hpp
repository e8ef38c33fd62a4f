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

#ifndef LGMLE_RNG_HPP_
#define LGMLE_RNG_HPP_

#include <cstdint>
#include <random>
#include <span>

namespace lgmle {

// Purpose tags for independent random streams derived from one user seed.
enum class Stream : std::uint64_t {
  kWeights = 1,
  kOutcomes = 2,
  kInit = 3,
  kReplicate = 4,
};

// Portable random source: std::mt19937_64 seeded through std::seed_seq
// (both bit-exactly specified by the standard) with the seed, the stream
// tag and a substream index. Uniform doubles use the top 53 bits, so draws
// are identical on every conforming platform. Do not route draws through
// std distributions: their output is implementation-defined.
class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream, std::uint64_t substream = 0);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Index drawn with the given (not necessarily normalized) weights.
  std::size_t categorical(std::span<const double> weights);

  // Standard exponential draw.
  double exponential();

 private:
  std::mt19937_64 engine_;
};

// Seed of the `index`-th replicate derived from a base seed.
std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t index);

}  // namespace lgmle

#endif  // LGMLE_RNG_HPP_
