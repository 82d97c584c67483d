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

#include "linreboot/environment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "linreboot/errors.hpp"

namespace linreboot {
namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

linalg::Vector uniform_unit_vector(std::size_t dim, double lo, double hi,
                                   Rng& rng) {
  std::uniform_real_distribution<double> unif(lo, hi);
  linalg::Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = unif(rng);
  const double norm = v.norm();
  if (norm == 0.0) throw RuntimeError("generate_env: zero vector drawn");
  return v / norm;
}

// Sign pattern from Binomial(d, 1/2) negatives, magnitudes 1 - u with
// u ~ U(0, 0.95), rescaled to the requested norm.
linalg::Vector covariate_theta(std::size_t dim, double target_norm, Rng& rng) {
  std::binomial_distribution<int> n_neg_dist(static_cast<int>(dim), 0.5);
  const auto n_neg = static_cast<std::size_t>(n_neg_dist(rng));
  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  linalg::Vector v = linalg::Vector::Ones(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n_neg; ++i) {
    v(static_cast<Eigen::Index>(order[i])) = -1.0;
  }
  std::uniform_real_distribution<double> shrink(0.0, 0.95);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) *= 1.0 - shrink(rng);
  return v * (target_norm / v.norm());
}

std::string join(const linalg::VectorRef& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += format_double(v(i));
  }
  return out;
}

linalg::Vector split_numbers(const std::string& text, std::size_t expected,
                             const std::string& key) {
  std::istringstream in(text);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    double x = 0.0;
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last) {
      throw ConfigError("env: malformed number '" + token + "' in " + key);
    }
    values.push_back(x);
  }
  if (values.size() != expected) {
    throw ConfigError("env: " + key + " has " + std::to_string(values.size()) +
                      " entries, expected " + std::to_string(expected));
  }
  return Eigen::Map<linalg::Vector>(values.data(),
                                    static_cast<Eigen::Index>(values.size()));
}

}  // namespace

std::string_view to_string(Setting setting) {
  switch (setting) {
    case Setting::kStochastic:
      return "stochastic";
    case Setting::kContextual:
      return "contextual";
    case Setting::kCovariates:
      return "covariates";
  }
  return "unknown";
}

Setting parse_setting(std::string_view text) {
  const std::string s = lower(text);
  if (s == "stochastic") return Setting::kStochastic;
  if (s == "contextual") return Setting::kContextual;
  if (s == "covariates") return Setting::kCovariates;
  throw ConfigError("unknown setting '" + std::string(text) +
                    "' (expected stochastic, contextual or covariates)");
}

double default_noise_variance(Setting setting) {
  return setting == Setting::kContextual ? 0.5 : 0.1;
}

bool EnvSpec::operator==(const EnvSpec& other) const {
  if (setting != other.setting || dim != other.dim || n_arms != other.n_arms ||
      noise_variance != other.noise_variance || seed != other.seed ||
      thetas != other.thetas || context_means != other.context_means ||
      fixed_contexts.has_value() != other.fixed_contexts.has_value()) {
    return false;
  }
  return !fixed_contexts || *fixed_contexts == *other.fixed_contexts;
}

EnvSpec generate_env(Setting setting, std::size_t dim, std::size_t n_arms,
                     std::uint64_t seed) {
  if (dim == 0) throw ConfigError("generate_env: dim must be at least 1");
  if (n_arms < 2) throw ConfigError("generate_env: n_arms must be at least 2");

  EnvSpec env;
  env.setting = setting;
  env.dim = dim;
  env.n_arms = n_arms;
  env.seed = seed;
  env.noise_variance = default_noise_variance(setting);

  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(StreamTag::kEnvironment)));
  const auto d = static_cast<Eigen::Index>(dim);
  const auto k = static_cast<Eigen::Index>(n_arms);
  switch (setting) {
    case Setting::kStochastic: {
      env.thetas.push_back(uniform_unit_vector(dim, -0.5, 0.5, rng));
      linalg::Matrix contexts(k, d);
      for (Eigen::Index a = 0; a < k; ++a) {
        contexts.row(a) = uniform_unit_vector(dim, 0.0, 1.0, rng).transpose();
      }
      env.fixed_contexts = std::move(contexts);
      break;
    }
    case Setting::kContextual: {
      env.thetas.push_back(uniform_unit_vector(dim, -0.5, 0.5, rng));
      for (Eigen::Index a = 0; a < k; ++a) {
        env.context_means.push_back(uniform_unit_vector(dim, 0.0, 1.0, rng));
      }
      break;
    }
    case Setting::kCovariates: {
      for (std::size_t a = 1; a <= n_arms; ++a) {
        const double norm = static_cast<double>(a) / static_cast<double>(n_arms);
        env.thetas.push_back(covariate_theta(dim, norm, rng));
      }
      break;
    }
  }
  return env;
}

linalg::Vector true_means(const EnvSpec& env, const linalg::Matrix& contexts) {
  const auto k = static_cast<Eigen::Index>(env.n_arms);
  linalg::Vector means(k);
  if (env.setting == Setting::kCovariates) {
    for (Eigen::Index a = 0; a < k; ++a) {
      means(a) = contexts.row(a).dot(env.thetas[static_cast<std::size_t>(a)]);
    }
  } else {
    means = contexts * env.thetas.front();
  }
  return means;
}

RoundContexts round_contexts(const EnvSpec& env, std::size_t round,
                             const EnvStream& stream) {
  RoundContexts rc;
  rc.round = round;
  const auto d = static_cast<Eigen::Index>(env.dim);
  const auto k = static_cast<Eigen::Index>(env.n_arms);
  switch (env.setting) {
    case Setting::kStochastic:
      rc.contexts = *env.fixed_contexts;
      break;
    case Setting::kContextual: {
      const double sd = std::sqrt(1.0 / (2.0 * static_cast<double>(env.n_arms)));
      rc.contexts.resize(k, d);
      for (Eigen::Index a = 0; a < k; ++a) {
        auto eng = stream.engine(StreamTag::kContext, round,
                                 static_cast<std::uint64_t>(a));
        std::normal_distribution<double> gauss(0.0, sd);
        const auto& mean = env.context_means[static_cast<std::size_t>(a)];
        for (Eigen::Index j = 0; j < d; ++j) rc.contexts(a, j) = mean(j) + gauss(eng);
      }
      break;
    }
    case Setting::kCovariates: {
      auto eng = stream.engine(StreamTag::kContext, round, 0);
      std::normal_distribution<double> gauss(0.0, 1.0);
      linalg::Vector shared(d);
      for (Eigen::Index j = 0; j < d; ++j) shared(j) = gauss(eng);
      rc.contexts = shared.transpose().replicate(k, 1);
      break;
    }
  }
  rc.true_means = true_means(env, rc.contexts);
  Eigen::Index best = 0;
  for (Eigen::Index a = 1; a < k; ++a) {
    if (rc.true_means(a) > rc.true_means(best)) best = a;
  }
  rc.best_arm = static_cast<std::size_t>(best);
  return rc;
}

PullOutcome pull(const EnvSpec& env, const RoundContexts& rc, std::size_t arm,
                 const EnvStream& stream) {
  if (arm >= env.n_arms) {
    throw std::out_of_range("pull: arm " + std::to_string(arm) +
                            " out of range for " + std::to_string(env.n_arms) +
                            " arms");
  }
  const auto a = static_cast<Eigen::Index>(arm);
  auto eng = stream.engine(StreamTag::kNoise, rc.round, arm);
  std::normal_distribution<double> gauss(0.0, std::sqrt(env.noise_variance));
  const double noise = env.noise_variance > 0.0 ? gauss(eng) : 0.0;
  PullOutcome out;
  out.reward = rc.true_means(a) + noise;
  out.regret = rc.true_means(static_cast<Eigen::Index>(rc.best_arm)) - rc.true_means(a);
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc()) throw RuntimeError("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string serialize_env(const EnvSpec& env) {
  std::ostringstream out;
  out << "setting = " << to_string(env.setting) << '\n';
  out << "dim = " << env.dim << '\n';
  out << "n_arms = " << env.n_arms << '\n';
  out << "noise_variance = " << format_double(env.noise_variance) << '\n';
  out << "seed = " << env.seed << '\n';
  for (std::size_t i = 0; i < env.thetas.size(); ++i) {
    out << "theta." << i << " = " << join(env.thetas[i]) << '\n';
  }
  if (env.fixed_contexts) {
    const auto& m = *env.fixed_contexts;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out << "context." << i << " = " << join(m.row(i).transpose()) << '\n';
    }
  }
  for (std::size_t i = 0; i < env.context_means.size(); ++i) {
    out << "context_mean." << i << " = " << join(env.context_means[i]) << '\n';
  }
  return out.str();
}

EnvSpec parse_env(std::string_view text) {
  std::map<std::string, std::string> fields;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw ConfigError("env: malformed line '" + line + "'");
    fields[line.substr(0, eq)] = line.substr(eq + 3);
  }
  auto take = [&](const std::string& key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError("env: missing field " + key);
    return it->second;
  };

  EnvSpec env;
  env.setting = parse_setting(take("setting"));
  env.dim = std::stoull(take("dim"));
  env.n_arms = std::stoull(take("n_arms"));
  env.noise_variance = split_numbers(take("noise_variance"), 1, "noise_variance")(0);
  env.seed = std::stoull(take("seed"));

  const std::size_t n_thetas =
      env.setting == Setting::kCovariates ? env.n_arms : 1;
  for (std::size_t i = 0; i < n_thetas; ++i) {
    const std::string key = "theta." + std::to_string(i);
    env.thetas.push_back(split_numbers(take(key), env.dim, key));
  }
  if (env.setting == Setting::kStochastic) {
    linalg::Matrix m(static_cast<Eigen::Index>(env.n_arms),
                     static_cast<Eigen::Index>(env.dim));
    for (std::size_t i = 0; i < env.n_arms; ++i) {
      const std::string key = "context." + std::to_string(i);
      m.row(static_cast<Eigen::Index>(i)) = split_numbers(take(key), env.dim, key).transpose();
    }
    env.fixed_contexts = std::move(m);
  }
  if (env.setting == Setting::kContextual) {
    for (std::size_t i = 0; i < env.n_arms; ++i) {
      const std::string key = "context_mean." + std::to_string(i);
      env.context_means.push_back(split_numbers(take(key), env.dim, key));
    }
  }
  return env;
}

}  // namespace linreboot
