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

// Experiment configuration: a flat `key = value` file with `#` comments.
//
//   setting = stochastic
//   dim = 5
//   horizon = 10000
//   policies = LinReBoot, LinUCB
//   policies.LinReBoot.sigma_omega = 0.3
//
// See docs/config.md for every key and its default.

#ifndef LINREBOOT_CONFIG_HPP_
#define LINREBOOT_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "linreboot/environment.hpp"
#include "linreboot/policy.hpp"

namespace linreboot {

struct PolicySpec {
  std::string name;
  std::map<std::string, std::string> params;
};

struct ExperimentConfig {
  Setting setting = Setting::kStochastic;
  std::size_t dim = 5;
  std::size_t n_arms = 0;  // 0 selects the setting default
  std::size_t horizon = 10000;
  std::size_t replications = 20;
  std::uint64_t master_seed = 1;
  double lambda = 0.1;
  std::size_t record_every = 10;
  std::size_t threads = 1;
  std::vector<PolicySpec> policies;

  std::size_t arms() const;
  const PolicySpec* find_policy(std::string_view name) const;
  PolicySpec& policy(std::string_view name);  // adds when missing

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// 100 arms for Stochastic and Contextual, 10 for Covariates.
std::size_t default_n_arms(Setting setting);

/// Default bootstrap weight scale for a setting and dimension.
double default_sigma_omega(Setting setting, std::size_t dim);

/// Reward bound B used by the pseudo-reward baselines.
double default_reward_bound(Setting setting);

/// Names accepted in the `policies` roster.
const std::vector<std::string>& known_policies();

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Applies one `key = value` assignment; used by the parser and the C API.
void set_config_value(ExperimentConfig& config, std::string_view key,
                      std::string_view value);

std::string serialize_config(const ExperimentConfig& config);

/// Builds a policy with defaults filled in for the config's setting.
/// Throws ConfigError naming the policy and field on a bad parameter.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec,
                                    const ExperimentConfig& config);

// Number parsing shared by the config and results readers.
double parse_real(std::string_view text, std::string_view field);
std::uint64_t parse_count(std::string_view text, std::string_view field);
std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

}  // namespace linreboot

#endif  // LINREBOOT_CONFIG_HPP_
