// Copyright 2026 The LinReBoot Authors.
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

// Random number plumbing. Policy exploration uses a private std::mt19937_64;
// environment randomness is drawn from short-lived SplitMix64 engines keyed
// by (seed, round, arm, purpose) so that every policy sees the same draws no
// matter which arms it pulls.

#ifndef LINREBOOT_RNG_HPP_
#define LINREBOOT_RNG_HPP_

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace linreboot {

using Rng = std::mt19937_64;

// SplitMix64 (Steele, Lea, Flood 2014). Cheap to seed, which matters when a
// fresh engine is created for every (round, arm) key.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Avalanche mix of a single word.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-sensitive combination of a seed with any number of keys.
constexpr std::uint64_t derive_seed(std::uint64_t seed) { return mix64(seed); }

template <typename... Keys>
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key,
                                    Keys... rest) {
  return derive_seed(mix64(seed + 0x9e3779b97f4a7c15ULL) ^ mix64(key), rest...);
}

// FNV-1a, used to key policy streams by name.
constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

enum class StreamTag : std::uint64_t {
  kEnvironment = 1,
  kContext = 2,
  kNoise = 3,
  kPolicy = 4,
};

}  // namespace linreboot

#endif  // LINREBOOT_RNG_HPP_
