// Copyright 2026 The POTMMCP Authors
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

#ifndef POTMMCP_RNG_H_
#define POTMMCP_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>

namespace potmmcp {

// Seed splitting. A child stream seed is the SplitMix64 finalizer folded
// over (parent, tag_1, ..., tag_k). Runs derive one seed per episode from
// the root seed, then one per purpose (planner, environment, ...) from the
// episode seed, so results do not depend on execution order.
std::uint64_t MixSeed(std::uint64_t x);
std::uint64_t DeriveSeed(std::uint64_t parent,
                         std::initializer_list<std::uint64_t> tags);
std::uint64_t HashTag(std::string_view text);

// Stream tags used across the code base.
namespace stream {
inline constexpr std::uint64_t kEpisode = 0x45;
inline constexpr std::uint64_t kEnvironment = 0x456e76;
inline constexpr std::uint64_t kTruePolicies = 0x547275;
inline constexpr std::uint64_t kPlanner = 0x506c6e;
inline constexpr std::uint64_t kOthers = 0x4f7468;
inline constexpr std::uint64_t kPayoffCell = 0x506179;
inline constexpr std::uint64_t kValueTable = 0x56616c;
}  // namespace stream

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(MixSeed(seed)) {}

  // Uniform in [0, 1).
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  int UniformInt(int n) {
    return static_cast<int>(Uniform() * static_cast<double>(n));
  }

  std::uint64_t NextU64() { return engine_(); }

  // Index drawn from an (approximately) normalized weight vector.
  int Categorical(std::span<const double> probs) {
    double u = Uniform();
    double acc = 0.0;
    int last_positive = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (probs[k] <= 0.0) continue;
      acc += probs[k];
      last_positive = static_cast<int>(k);
      if (u < acc) return static_cast<int>(k);
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace potmmcp

#endif  // POTMMCP_RNG_H_
