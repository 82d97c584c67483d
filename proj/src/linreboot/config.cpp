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

#include "linreboot/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "linreboot/errors.hpp"

namespace linreboot {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_real(std::string_view text, std::string_view field) {
  const std::string_view t = trim(text);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(x)) {
    throw ConfigError(std::string(field) + ": expected a number, got '" +
                      std::string(text) + "'");
  }
  return x;
}

std::uint64_t parse_count(std::string_view text, std::string_view field) {
  const std::string_view t = trim(text);
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(std::string(field) + ": expected a non-negative integer, got '" +
                      std::string(text) + "'");
  }
  return x;
}

std::size_t default_n_arms(Setting setting) {
  return setting == Setting::kCovariates ? 10 : 100;
}

double default_sigma_omega(Setting setting, std::size_t dim) {
  switch (setting) {
    case Setting::kStochastic:
      return dim <= 5 ? 0.3 : (dim <= 10 ? 0.4 : 0.5);
    case Setting::kContextual:
      return 0.05;
    case Setting::kCovariates:
      return dim <= 10 ? 1.0 : 0.5;
  }
  return 0.3;
}

double default_reward_bound(Setting setting) {
  switch (setting) {
    case Setting::kStochastic:
      return 1.0 + 3.0 / std::sqrt(10.0);
    case Setting::kContextual:
      return 1.0 + 3.0 / std::sqrt(2.0);
    case Setting::kCovariates:
      return 1.3;
  }
  return 1.0;
}

const std::vector<std::string>& known_policies() {
  static const std::vector<std::string> names = {
      "LinReBoot", "LinTS-G", "LinTS-IG", "LinPHE",
      "LinGIRO",   "LinUCB",  "Oracle",   "Uniform"};
  return names;
}

namespace {

const std::map<std::string, std::set<std::string>>& known_params() {
  static const std::map<std::string, std::set<std::string>> params = {
      {"LinReBoot", {"sigma_omega", "sampler"}},
      {"LinTS-G", {"scale"}},
      {"LinTS-IG", {"a0", "b0", "tau2"}},
      {"LinPHE", {"a", "reward_bound"}},
      {"LinGIRO", {"a", "reward_bound"}},
      {"LinUCB", {"confidence", "l2", "s2", "context_bound"}},
      {"Oracle", {}},
      {"Uniform", {}},
  };
  return params;
}

void check_policy_name(std::string_view name) {
  const auto& names = known_policies();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigError("policies: unknown policy '" + std::string(name) + "'");
  }
}

}  // namespace

std::size_t ExperimentConfig::arms() const {
  return n_arms == 0 ? default_n_arms(setting) : n_arms;
}

const PolicySpec* ExperimentConfig::find_policy(std::string_view name) const {
  for (const auto& p : policies) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

PolicySpec& ExperimentConfig::policy(std::string_view name) {
  for (auto& p : policies) {
    if (p.name == name) return p;
  }
  policies.push_back(PolicySpec{std::string(name), {}});
  return policies.back();
}

void ExperimentConfig::validate() const {
  if (dim == 0) throw ConfigError("dim: must be >= 1");
  if (arms() < 2) throw ConfigError("n_arms: must be >= 2");
  if (horizon <= arms()) {
    throw ConfigError("horizon: must exceed n_arms (" + std::to_string(arms()) + ")");
  }
  if (replications == 0) throw ConfigError("replications: must be >= 1");
  if (!(lambda > 0.0)) throw ConfigError("lambda: must be positive");
  if (record_every == 0) throw ConfigError("record_every: must be >= 1");
  if (threads == 0) throw ConfigError("threads: must be >= 1");
  if (policies.empty()) throw ConfigError("policies: roster is empty");
  std::set<std::string> seen;
  for (const auto& p : policies) {
    check_policy_name(p.name);
    if (!seen.insert(p.name).second) {
      throw ConfigError("policies: '" + p.name + "' listed twice");
    }
    (void)make_policy(p, *this);
  }
}

void set_config_value(ExperimentConfig& config, std::string_view key_in,
                      std::string_view value_in) {
  const std::string key(trim(key_in));
  const std::string_view value = trim(value_in);
  if (key == "setting") {
    config.setting = parse_setting(value);
  } else if (key == "dim") {
    config.dim = parse_count(value, key);
  } else if (key == "n_arms") {
    config.n_arms = parse_count(value, key);
  } else if (key == "horizon") {
    config.horizon = parse_count(value, key);
  } else if (key == "replications") {
    config.replications = parse_count(value, key);
  } else if (key == "master_seed") {
    config.master_seed = parse_count(value, key);
  } else if (key == "lambda") {
    config.lambda = parse_real(value, key);
  } else if (key == "record_every") {
    config.record_every = parse_count(value, key);
  } else if (key == "threads") {
    config.threads = parse_count(value, key);
  } else if (key == "policies") {
    std::vector<PolicySpec> roster;
    for (const auto& name : split(value, ',')) {
      if (name.empty()) continue;
      check_policy_name(name);
      const PolicySpec* existing = config.find_policy(name);
      roster.push_back(existing ? *existing : PolicySpec{name, {}});
    }
    // Keep parameters given before the roster line.
    for (const auto& p : config.policies) {
      if (std::none_of(roster.begin(), roster.end(),
                       [&](const PolicySpec& r) { return r.name == p.name; }) &&
          !p.params.empty()) {
        throw ConfigError("policies." + p.name + ": policy not in roster");
      }
    }
    config.policies = std::move(roster);
  } else if (key.rfind("policies.", 0) == 0) {
    const std::string rest = key.substr(9);
    const auto dot = rest.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == rest.size()) {
      throw ConfigError(key + ": expected policies.<name>.<param>");
    }
    const std::string name = rest.substr(0, dot);
    const std::string param = rest.substr(dot + 1);
    check_policy_name(name);
    const auto& allowed = known_params().at(name);
    if (allowed.count(param) == 0) {
      throw ConfigError(key + ": unknown parameter for " + name);
    }
    config.policy(name).params[param] = std::string(value);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::set<std::string> roster;
  bool roster_seen = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    try {
      set_config_value(config, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (key == "policies") {
      roster_seen = true;
      roster.clear();
      for (const auto& p : config.policies) roster.insert(p.name);
    }
  }
  if (!roster_seen) throw ConfigError("policies: roster is missing");
  for (const auto& p : config.policies) {
    if (roster.count(p.name) == 0) {
      throw ConfigError("policies." + p.name + ": policy not in roster");
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string serialize_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "setting = " << to_string(config.setting) << '\n'
      << "dim = " << config.dim << '\n'
      << "n_arms = " << config.arms() << '\n'
      << "horizon = " << config.horizon << '\n'
      << "replications = " << config.replications << '\n'
      << "master_seed = " << config.master_seed << '\n'
      << "lambda = " << format_double(config.lambda) << '\n'
      << "record_every = " << config.record_every << '\n'
      << "threads = " << config.threads << '\n'
      << "policies = ";
  for (std::size_t i = 0; i < config.policies.size(); ++i) {
    out << (i ? ", " : "") << config.policies[i].name;
  }
  out << '\n';
  for (const auto& p : config.policies) {
    for (const auto& [k, v] : p.params) {
      out << "policies." << p.name << '.' << k << " = " << v << '\n';
    }
  }
  return out.str();
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec,
                                    const ExperimentConfig& config) {
  check_policy_name(spec.name);
  const auto& allowed = known_params().at(spec.name);
  for (const auto& [k, v] : spec.params) {
    if (allowed.count(k) == 0) {
      throw ConfigError("policies." + spec.name + "." + k + ": unknown parameter");
    }
  }
  auto real = [&](const std::string& field, double fallback) {
    const auto it = spec.params.find(field);
    if (it == spec.params.end()) return fallback;
    return parse_real(it->second, "policies." + spec.name + "." + field);
  };

  PolicyContext ctx;
  ctx.setting = config.setting;
  ctx.dim = config.dim;
  ctx.n_arms = config.arms();
  ctx.lambda = config.lambda;

  try {
    if (spec.name == "LinReBoot") {
      SamplerPath path = SamplerPath::kEfficient;
      if (const auto it = spec.params.find("sampler"); it != spec.params.end()) {
        if (it->second == "naive") {
          path = SamplerPath::kNaive;
        } else if (it->second != "efficient") {
          throw ConfigError("sampler must be 'efficient' or 'naive'");
        }
      }
      return std::make_unique<LinReBoot>(
          ctx, real("sigma_omega", default_sigma_omega(config.setting, config.dim)), path);
    }
    if (spec.name == "LinTS-G") {
      return std::make_unique<LinTSGaussian>(ctx, real("scale", 1.0));
    }
    if (spec.name == "LinTS-IG") {
      const double tau2 = real("tau2", 5.0);
      if (!(tau2 > 0.0)) throw ConfigError("tau2 must be positive");
      return std::make_unique<LinTSInverseGamma>(ctx, real("a0", 2.0), real("b0", 2.0),
                                                 tau2);
    }
    if (spec.name == "LinPHE") {
      return std::make_unique<LinPHE>(ctx, real("a", 0.5),
                                      real("reward_bound", default_reward_bound(config.setting)));
    }
    if (spec.name == "LinGIRO") {
      const double a = real("a", 1.0);
      if (!(a >= 1.0) || a != std::floor(a)) throw ConfigError("a must be a positive integer");
      return std::make_unique<LinGIRO>(ctx, static_cast<std::size_t>(a),
                                       real("reward_bound", default_reward_bound(config.setting)));
    }
    if (spec.name == "LinUCB") {
      LinUCBParams p;
      p.confidence = real("confidence", p.confidence);
      p.l2 = real("l2", std::sqrt(default_noise_variance(config.setting)));
      p.s2 = real("s2", 1.0);
      p.context_bound = real(
          "context_bound",
          config.setting == Setting::kCovariates ? std::sqrt(static_cast<double>(config.dim))
                                                 : 1.0);
      return std::make_unique<LinUCB>(ctx, p);
    }
    if (spec.name == "Oracle") return std::make_unique<OraclePolicy>(ctx);
    return std::make_unique<UniformPolicy>(ctx);
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind("policies.", 0) == 0) throw;
    throw ConfigError("policies." + spec.name + ": " + what);
  }
}

}  // namespace linreboot
