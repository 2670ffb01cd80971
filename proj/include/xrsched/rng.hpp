// Copyright 2026 The xrsched Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef XRSCHED_RNG_HPP_
#define XRSCHED_RNG_HPP_

#include <cstdint>
#include <random>

namespace xrsched {

// Independent stream families. Trial k of family D draws from
// Rng::ForStream(seed, D, k), so any trial replays in isolation.
enum class StreamDomain : std::uint64_t {
  kTrainScenario = 1,
  kTrainPolicy = 2,
  kEvalScenario = 3,
  kEvalPolicy = 4,
  kOracleScenario = 5,
  kNetworkInit = 6,
  kReplay = 7,
};

std::uint64_t SplitMix64(std::uint64_t x);

// mt19937_64 plus distribution code written out here, since the standard
// distributions are not bit-identical across library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(SplitMix64(seed)) {}

  static Rng ForStream(std::uint64_t seed, StreamDomain domain,
                       std::uint64_t index);

  std::uint64_t NextU64() { return engine_(); }
  // [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t UniformIndex(std::uint64_t n);
  // Box-Muller standard normal.
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace xrsched

#endif  // XRSCHED_RNG_HPP_
