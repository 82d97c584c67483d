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

// Replicated experiments: every policy in the roster plays the same
// environment realization per replication; curves are thinned by
// record_every and the final round is always kept.

#ifndef LINREBOOT_HARNESS_HPP_
#define LINREBOOT_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "linreboot/config.hpp"

namespace linreboot {

struct RegretCurve {
  std::string policy;
  std::uint64_t seed = 0;  // replication seed
  std::vector<std::size_t> rounds;
  std::vector<double> cum_regret;
  double seconds = 0.0;
};

struct AggregateCurve {
  std::string policy;
  std::vector<std::size_t> rounds;
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::size_t reps = 0;
};

struct RunResult {
  Setting setting = Setting::kStochastic;
  std::size_t dim = 0;
  std::vector<RegretCurve> curves;  // replication-major, roster order within
  std::vector<AggregateCurve> aggregates;
};

/// Seed of replication `rep` under a master seed.
std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t rep);

/// Runs fn(0..n-1) on up to `threads` workers. Exceptions are rethrown.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

/// Plays one policy for the whole horizon.
RegretCurve run_policy(const ExperimentConfig& config, const PolicySpec& spec,
                       const EnvSpec& env, std::size_t rep);

std::vector<RegretCurve> run_experiment(const ExperimentConfig& config);

/// Pointwise mean and standard error per policy, in first-seen order.
/// The standard error is sqrt(mean squared deviation / reps), 0 for one curve.
/// Throws RuntimeError when round grids of one policy differ.
std::vector<AggregateCurve> aggregate(const std::vector<RegretCurve>& curves);

RunResult run_and_aggregate(const ExperimentConfig& config);

struct TunePoint {
  double sigma_omega = 0.0;
  RunResult result;
  double final_mean = 0.0;
  double final_stderr = 0.0;
};

/// Runs LinReBoot alone once per grid value with shared seeds.
std::vector<TunePoint> tune_sigma_omega(const ExperimentConfig& config,
                                        const std::vector<double>& grid);

// CSV persistence: <setting>_<d>_{curves,agg,timing}.csv.
std::string results_stem(Setting setting, std::size_t dim);
void write_results(const RunResult& result, const std::string& dir);
RunResult read_results(const std::string& dir, Setting setting, std::size_t dim);

/// Writes <dir>/tune_summary.csv plus one subdirectory per grid value.
void write_tuning(const std::vector<TunePoint>& points, const std::string& dir);

/// Re-reads every curve file in dir, rewrites the aggregate files, and returns
/// a final-round summary as CSV text.
std::string export_results(const std::string& dir);

}  // namespace linreboot

#endif  // LINREBOOT_HARNESS_HPP_
