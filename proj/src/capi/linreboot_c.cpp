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

#include "linreboot/linreboot.h"

#include <cstring>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>

#include "linreboot/config.hpp"
#include "linreboot/environment.hpp"
#include "linreboot/errors.hpp"
#include "linreboot/harness.hpp"
#include "linreboot/policy.hpp"
#include "linreboot/verifier.hpp"

struct lrb_config {
  linreboot::ExperimentConfig value;
};

struct lrb_results {
  linreboot::RunResult value;
};

struct lrb_env {
  linreboot::EnvSpec value;
};

struct lrb_policy {
  std::unique_ptr<linreboot::Policy> policy;
  linreboot::Rng rng;
};

namespace {

thread_local std::string g_last_error;

lrb_status fail(lrb_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
lrb_status guarded(Fn&& fn) {
  try {
    fn();
    return LRB_OK;
  } catch (const linreboot::DimensionError& e) {
    return fail(LRB_ERR_DIMENSION, e.what());
  } catch (const linreboot::ConfigError& e) {
    return fail(LRB_ERR_CONFIG, e.what());
  } catch (const std::out_of_range& e) {
    return fail(LRB_ERR_INVALID_ARG, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(LRB_ERR_INVALID_ARG, e.what());
  } catch (const std::exception& e) {
    return fail(LRB_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(LRB_ERR_RUNTIME, "unknown error");
  }
}

void require(const void* ptr, const char* what) {
  if (ptr == nullptr) throw std::invalid_argument(std::string(what) + " is null");
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* lrb_version(void) { return LINREBOOT_VERSION; }

const char* lrb_last_error(void) { return g_last_error.c_str(); }

void lrb_string_free(char* text) { delete[] text; }

lrb_status lrb_config_load(const char* path, lrb_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new lrb_config{linreboot::load_config(path)};
  });
}

lrb_status lrb_config_parse(const char* text, lrb_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new lrb_config{linreboot::parse_config(text)};
  });
}

lrb_status lrb_config_set(lrb_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    linreboot::set_config_value(config->value, key, value);
  });
}

lrb_status lrb_config_validate(const lrb_config* config) {
  return guarded([&] {
    require(config, "config");
    config->value.validate();
  });
}

lrb_status lrb_config_serialize(const lrb_config* config, char** text) {
  return guarded([&] {
    require(config, "config");
    require(text, "text");
    *text = copy_string(linreboot::serialize_config(config->value));
  });
}

void lrb_config_free(lrb_config* config) { delete config; }

lrb_status lrb_run(const lrb_config* config, lrb_results** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = new lrb_results{linreboot::run_and_aggregate(config->value)};
  });
}

lrb_status lrb_results_write(const lrb_results* results, const char* dir) {
  return guarded([&] {
    require(results, "results");
    require(dir, "dir");
    linreboot::write_results(results->value, dir);
  });
}

size_t lrb_results_num_curves(const lrb_results* results) {
  return results ? results->value.curves.size() : 0;
}

lrb_status lrb_results_curve(const lrb_results* results, size_t index,
                             const char** policy, uint64_t* seed, size_t* n_points,
                             const size_t** rounds, const double** cum_regret,
                             double* seconds) {
  return guarded([&] {
    require(results, "results");
    const auto& c = results->value.curves.at(index);
    if (policy) *policy = c.policy.c_str();
    if (seed) *seed = c.seed;
    if (n_points) *n_points = c.rounds.size();
    if (rounds) *rounds = c.rounds.data();
    if (cum_regret) *cum_regret = c.cum_regret.data();
    if (seconds) *seconds = c.seconds;
  });
}

lrb_status lrb_results_final_mean(const lrb_results* results, const char* policy,
                                  double* mean, double* stderr_out) {
  return guarded([&] {
    require(results, "results");
    require(policy, "policy");
    for (const auto& a : results->value.aggregates) {
      if (a.policy == policy && !a.mean.empty()) {
        if (mean) *mean = a.mean.back();
        if (stderr_out) *stderr_out = a.stderr_.back();
        return;
      }
    }
    throw std::out_of_range(std::string("no results for policy '") + policy + "'");
  });
}

void lrb_results_free(lrb_results* results) { delete results; }

lrb_status lrb_tune(const lrb_config* config, const double* grid, size_t grid_len,
                    const char* out_dir, size_t* best_index) {
  return guarded([&] {
    require(config, "config");
    require(out_dir, "out_dir");
    if (grid_len > 0) require(grid, "grid");
    const std::vector<double> values(grid, grid + grid_len);
    const auto points = linreboot::tune_sigma_omega(config->value, values);
    linreboot::write_tuning(points, out_dir);
    if (best_index) {
      size_t best = 0;
      for (size_t i = 1; i < points.size(); ++i) {
        if (points[i].final_mean < points[best].final_mean) best = i;
      }
      *best_index = best;
    }
  });
}

lrb_status lrb_verify(const char* suite, const char* out_dir, uint64_t seed,
                      size_t threads, int* all_pass) {
  return guarded([&] {
    require(suite, "suite");
    require(out_dir, "out_dir");
    linreboot::verify::SuiteOptions options;
    options.seed = seed;
    options.threads = threads == 0 ? 1 : threads;
    const auto reports = linreboot::verify::run_suite(suite, options);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw linreboot::RuntimeError(std::string("cannot create '") + out_dir + "'");
    bool ok = true;
    for (const auto& r : reports) {
      const auto path = std::filesystem::path(out_dir) / ("verify_" + r.suite + ".txt");
      linreboot::verify::write_report(r, path.string());
      ok = ok && r.all_pass();
    }
    if (all_pass) *all_pass = ok ? 1 : 0;
  });
}

lrb_status lrb_export(const char* dir, char** csv) {
  return guarded([&] {
    require(dir, "dir");
    require(csv, "csv");
    *csv = copy_string(linreboot::export_results(dir));
  });
}

lrb_status lrb_env_generate(const char* setting, size_t dim, size_t n_arms,
                            uint64_t seed, lrb_env** out) {
  return guarded([&] {
    require(setting, "setting");
    require(out, "out");
    *out = new lrb_env{
        linreboot::generate_env(linreboot::parse_setting(setting), dim, n_arms, seed)};
  });
}

lrb_status lrb_env_parse(const char* text, lrb_env** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new lrb_env{linreboot::parse_env(text)};
  });
}

lrb_status lrb_env_serialize(const lrb_env* env, char** text) {
  return guarded([&] {
    require(env, "env");
    require(text, "text");
    *text = copy_string(linreboot::serialize_env(env->value));
  });
}

size_t lrb_env_dim(const lrb_env* env) { return env ? env->value.dim : 0; }

size_t lrb_env_num_arms(const lrb_env* env) { return env ? env->value.n_arms : 0; }

lrb_status lrb_env_context(const lrb_env* env, uint64_t stream_seed, size_t round,
                           size_t arm, double* context, size_t dim) {
  return guarded([&] {
    require(env, "env");
    require(context, "context");
    if (dim != env->value.dim) throw linreboot::DimensionError("context buffer length mismatch");
    if (arm >= env->value.n_arms) throw std::out_of_range("arm out of range");
    const auto rc = linreboot::round_contexts(env->value, round,
                                              linreboot::EnvStream(stream_seed));
    for (size_t j = 0; j < dim; ++j) {
      context[j] = rc.contexts(static_cast<Eigen::Index>(arm), static_cast<Eigen::Index>(j));
    }
  });
}

lrb_status lrb_env_pull(const lrb_env* env, uint64_t stream_seed, size_t round,
                        size_t arm, double* reward, double* regret) {
  return guarded([&] {
    require(env, "env");
    const linreboot::EnvStream stream(stream_seed);
    const auto rc = linreboot::round_contexts(env->value, round, stream);
    const auto out = linreboot::pull(env->value, rc, arm, stream);
    if (reward) *reward = out.reward;
    if (regret) *regret = out.regret;
  });
}

void lrb_env_free(lrb_env* env) { delete env; }

lrb_status lrb_policy_create(const lrb_config* config, const char* name,
                             uint64_t rng_seed, lrb_policy** out) {
  return guarded([&] {
    require(config, "config");
    require(name, "name");
    require(out, "out");
    const linreboot::PolicySpec* spec = config->value.find_policy(name);
    if (spec == nullptr) {
      throw linreboot::ConfigError(std::string("policy '") + name + "' is not in the roster");
    }
    *out = new lrb_policy{linreboot::make_policy(*spec, config->value),
                          linreboot::Rng(rng_seed)};
  });
}

lrb_status lrb_policy_select(lrb_policy* policy, const lrb_env* env,
                             uint64_t stream_seed, size_t round, size_t* arm) {
  return guarded([&] {
    require(policy, "policy");
    require(env, "env");
    require(arm, "arm");
    const auto& ctx = policy->policy->context();
    if (ctx.dim != env->value.dim || ctx.n_arms != env->value.n_arms) {
      throw linreboot::DimensionError("policy and environment shapes differ");
    }
    const auto rc = linreboot::round_contexts(env->value, round,
                                              linreboot::EnvStream(stream_seed));
    *arm = policy->policy->select_arm(rc, round, policy->rng);
  });
}

lrb_status lrb_policy_observe(lrb_policy* policy, size_t arm, const double* context,
                              size_t dim, double reward) {
  return guarded([&] {
    require(policy, "policy");
    require(context, "context");
    const Eigen::Map<const linreboot::linalg::Vector> x(context,
                                                        static_cast<Eigen::Index>(dim));
    policy->policy->observe(arm, x, reward);
  });
}

void lrb_policy_free(lrb_policy* policy) { delete policy; }

}  // extern "C"
