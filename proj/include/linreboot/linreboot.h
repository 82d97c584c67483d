/*
 * Copyright 2026 The LinReBoot Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the LinReBoot bandit toolkit.
 *
 * Objects are opaque handles created by lrb_*_create/load/parse functions and
 * released by the matching lrb_*_free. Every fallible call returns an
 * lrb_status; on failure lrb_last_error() describes the problem. The message
 * is thread-local and valid until the next failing call on the same thread.
 * Strings returned through char** out-parameters are released with
 * lrb_string_free.
 */

#ifndef LINREBOOT_LINREBOOT_H_
#define LINREBOOT_LINREBOOT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LRB_API __declspec(dllexport)
#else
#define LRB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lrb_status {
  LRB_OK = 0,
  LRB_ERR_CONFIG = 1,        /* invalid configuration or parameter value */
  LRB_ERR_RUNTIME = 2,       /* I/O failure or numerical breakdown */
  LRB_ERR_INVALID_ARG = 3,   /* null pointer, index out of range */
  LRB_ERR_DIMENSION = 4      /* vector length mismatch */
} lrb_status;

typedef struct lrb_config lrb_config;
typedef struct lrb_results lrb_results;
typedef struct lrb_env lrb_env;
typedef struct lrb_policy lrb_policy;

LRB_API const char* lrb_version(void);
LRB_API const char* lrb_last_error(void);
LRB_API void lrb_string_free(char* text);

/* ---- configuration ---------------------------------------------------- */

LRB_API lrb_status lrb_config_load(const char* path, lrb_config** out);
LRB_API lrb_status lrb_config_parse(const char* text, lrb_config** out);
/* Applies one `key = value` assignment without validating the whole config. */
LRB_API lrb_status lrb_config_set(lrb_config* config, const char* key,
                                  const char* value);
LRB_API lrb_status lrb_config_validate(const lrb_config* config);
LRB_API lrb_status lrb_config_serialize(const lrb_config* config, char** text);
LRB_API void lrb_config_free(lrb_config* config);

/* ---- experiments ------------------------------------------------------ */

LRB_API lrb_status lrb_run(const lrb_config* config, lrb_results** out);
/* Writes <setting>_<d>_{curves,agg,timing}.csv into dir. */
LRB_API lrb_status lrb_results_write(const lrb_results* results, const char* dir);
LRB_API size_t lrb_results_num_curves(const lrb_results* results);
/* Borrowed views into one curve; valid while results lives. */
LRB_API lrb_status lrb_results_curve(const lrb_results* results, size_t index,
                                     const char** policy, uint64_t* seed,
                                     size_t* n_points, const size_t** rounds,
                                     const double** cum_regret, double* seconds);
/* Mean cumulative regret at the last recorded round. */
LRB_API lrb_status lrb_results_final_mean(const lrb_results* results,
                                          const char* policy, double* mean,
                                          double* stderr_out);
LRB_API void lrb_results_free(lrb_results* results);

/* Runs LinReBoot once per sigma_omega value and writes out_dir/tune_summary.csv
 * plus one results subdirectory per value. best_index may be NULL. */
LRB_API lrb_status lrb_tune(const lrb_config* config, const double* grid,
                            size_t grid_len, const char* out_dir,
                            size_t* best_index);

/* suite is lemma52, lemma53, lemma54, bounds or all. Writes
 * out_dir/verify_<suite>.txt per suite; all_pass may be NULL. */
LRB_API lrb_status lrb_verify(const char* suite, const char* out_dir,
                              uint64_t seed, size_t threads, int* all_pass);

/* Rebuilds aggregate files in dir from its curve files and returns a
 * final-round summary as CSV. */
LRB_API lrb_status lrb_export(const char* dir, char** csv);

/* ---- environments ----------------------------------------------------- */

/* setting is stochastic, contextual or covariates. */
LRB_API lrb_status lrb_env_generate(const char* setting, size_t dim,
                                    size_t n_arms, uint64_t seed, lrb_env** out);
LRB_API lrb_status lrb_env_parse(const char* text, lrb_env** out);
LRB_API lrb_status lrb_env_serialize(const lrb_env* env, char** text);
LRB_API size_t lrb_env_dim(const lrb_env* env);
LRB_API size_t lrb_env_num_arms(const lrb_env* env);
/* Context of one arm at a round (1-based) of the replication keyed by
 * stream_seed; context must hold dim doubles. */
LRB_API lrb_status lrb_env_context(const lrb_env* env, uint64_t stream_seed,
                                   size_t round, size_t arm, double* context,
                                   size_t dim);
LRB_API lrb_status lrb_env_pull(const lrb_env* env, uint64_t stream_seed,
                                size_t round, size_t arm, double* reward,
                                double* regret);
LRB_API void lrb_env_free(lrb_env* env);

/* ---- policies --------------------------------------------------------- */

/* Builds a roster policy of config with its parameters; rng_seed drives the
 * policy's private exploration stream. */
LRB_API lrb_status lrb_policy_create(const lrb_config* config, const char* name,
                                     uint64_t rng_seed, lrb_policy** out);
LRB_API lrb_status lrb_policy_select(lrb_policy* policy, const lrb_env* env,
                                     uint64_t stream_seed, size_t round,
                                     size_t* arm);
LRB_API lrb_status lrb_policy_observe(lrb_policy* policy, size_t arm,
                                      const double* context, size_t dim,
                                      double reward);
LRB_API void lrb_policy_free(lrb_policy* policy);

#ifdef __cplusplus
}
#endif

#endif /* LINREBOOT_LINREBOOT_H_ */
