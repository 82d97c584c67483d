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

// Synthetic linear bandit environments.
//
//   Stochastic  - K fixed unit-norm contexts, one shared unit-norm theta,
//                 N(0, 0.1) noise.
//   Contextual  - per-round contexts x_k ~ N(nu_k, I / (2K)) around fixed
//                 unit-norm means, shared theta, N(0, 0.5) noise.
//   Covariates  - one shared per-round context ~ N(0, I) scored by a
//                 per-arm theta_k with ||theta_k|| = k / K, N(0, 0.1) noise.
//
// Every random quantity after generation (contexts, noise) is a pure
// function of (replication seed, round, arm).

#ifndef LINREBOOT_ENVIRONMENT_HPP_
#define LINREBOOT_ENVIRONMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linreboot/linalg.hpp"
#include "linreboot/rng.hpp"

namespace linreboot {

enum class Setting { kStochastic, kContextual, kCovariates };

std::string_view to_string(Setting setting);
// Accepts "stochastic", "contextual", "covariates" (case-insensitive).
Setting parse_setting(std::string_view text);

struct EnvSpec {
  Setting setting = Setting::kStochastic;
  std::size_t dim = 0;
  std::size_t n_arms = 0;
  // One shared theta, or n_arms per-arm thetas for Covariates.
  std::vector<linalg::Vector> thetas;
  // Stochastic only: n_arms x dim.
  std::optional<linalg::Matrix> fixed_contexts;
  // Contextual only: n_arms means.
  std::vector<linalg::Vector> context_means;
  double noise_variance = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const EnvSpec& other) const;
};

// Default noise variance of each setting.
double default_noise_variance(Setting setting);

// Throws ConfigError for n_arms < 2 or dim == 0.
EnvSpec generate_env(Setting setting, std::size_t dim, std::size_t n_arms,
                     std::uint64_t seed);

struct RoundContexts {
  std::size_t round = 0;           // 1-based
  linalg::Matrix contexts;         // n_arms x dim
  linalg::Vector true_means;       // n_arms
  std::size_t best_arm = 0;        // lowest index among maxima
};

// Keyed source of per-round environment randomness for one replication.
class EnvStream {
 public:
  explicit EnvStream(std::uint64_t replication_seed)
      : seed_(replication_seed) {}

  SplitMix64 engine(StreamTag tag, std::uint64_t round,
                    std::uint64_t arm) const {
    return SplitMix64(derive_seed(seed_, static_cast<std::uint64_t>(tag),
                                  round, arm));
  }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

RoundContexts round_contexts(const EnvSpec& env, std::size_t round,
                             const EnvStream& stream);

struct PullOutcome {
  double reward = 0.0;
  double regret = 0.0;  // true_means[best] - true_means[arm]
};

// Throws std::out_of_range when arm >= n_arms.
PullOutcome pull(const EnvSpec& env, const RoundContexts& rc, std::size_t arm,
                 const EnvStream& stream);

// Mean reward vector for a given set of contexts.
linalg::Vector true_means(const EnvSpec& env, const linalg::Matrix& contexts);

// Text form: one `key = value` line per field, numbers with 17 significant
// digits. parse_env(serialize_env(e)) == e exactly.
std::string serialize_env(const EnvSpec& env);
EnvSpec parse_env(std::string_view text);

// Shortest round-trip-exact decimal for a double, at most 17 digits.
std::string format_double(double value);

}  // namespace linreboot

#endif  // LINREBOOT_ENVIRONMENT_HPP_
