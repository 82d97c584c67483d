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

// Monte Carlo checks of the confidence radii and the verification suites
// behind `linreboot verify`.

#ifndef LINREBOOT_VERIFIER_HPP_
#define LINREBOOT_VERIFIER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linreboot/environment.hpp"
#include "linreboot/optimism.hpp"
#include "linreboot/policy.hpp"

namespace linreboot::verify {

struct ArmSnapshot {
  std::size_t s = 0;
  double mu_hat = 0.0;
  double true_mean = 0.0;
  double rss = 0.0;
  double norm = 0.0;  // ||x_k||_{V^{-1}}
};

/// LinReBoot state after `rounds` rounds, evaluated at round rounds + 1.
struct FrozenHistory {
  EnvSpec env;
  std::size_t round = 0;
  RoundContexts contexts;
  PolicyState state;
  std::vector<ArmSnapshot> arms;
};

/// Plays LinReBoot (reward logs retained) on a fresh environment.
FrozenHistory freeze_history(Setting setting, std::size_t dim, std::size_t n_arms,
                             std::size_t rounds, double sigma_omega,
                             std::uint64_t seed, double lambda = 0.1,
                             std::optional<double> noise_variance = std::nullopt);

struct Lemma52Config {
  Setting setting = Setting::kStochastic;
  std::size_t dim = 5;
  std::size_t n_arms = 10;
  std::size_t round = 500;
  double alpha = 0.05;
  double lambda = 0.1;
  double sigma_omega = 0.3;
  double s2 = 1.0;
  double context_bound = 1.0;
  std::optional<double> noise_variance;  // setting default when empty
  std::optional<double> l2;              // sqrt(noise variance) when empty
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

/// Per-arm frequency of |mu_hat_k - mu_k| <= c1(t) ||x_k||_{V^{-1}} at round t.
std::vector<double> mc_coverage_lemma52(const Lemma52Config& config);

/// Per-arm frequency of |mu_tilde - mu_hat| <= c2 ||x_k||_{V^{-1}} over
/// `trials` efficient bootstrap draws.
std::vector<double> mc_coverage_lemma53(const FrozenHistory& history,
                                        double sigma_omega, double beta,
                                        std::size_t trials, std::uint64_t seed);

/// Frequency of mu_tilde - mu_hat > c1 * norm for one arm of a frozen history.
double mc_anti_concentration(const FrozenHistory& history, std::size_t arm,
                             double c1_val, double sigma_omega,
                             std::size_t draws, std::uint64_t seed);

/// Stochastic environment summary and theory constants used by the bound checks.
struct BoundSetup {
  optimism::OptimismParams params;
  optimism::EnvSummary summary;
  bool degenerate = false;
};
BoundSetup bound_setup(std::size_t dim, std::size_t n_arms, double b,
                       std::uint64_t seed);

/// bound(n) with alpha_k = beta_k = 1 / sqrt(n).
double corollary_bound(const BoundSetup& setup, std::size_t n);

struct ReportEntry {
  std::string metric;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  // how value is compared with bound
  bool pass = false;
};

struct Report {
  std::string suite;
  std::vector<std::pair<std::string, std::string>> info;
  std::vector<ReportEntry> entries;

  /// relation is one of ">=", "<=", ">", "<".
  void add(std::string metric, double value, std::string relation, double bound);
  /// Passes when |value - target| <= tolerance.
  void add_within(std::string metric, double value, double target, double tolerance);
  bool all_pass() const;
};

/// Flat `key = value` text: one block of metric.value / .bound / .relation /
/// .status lines per entry, then a summary.
std::string format_report(const Report& report);
void write_report(const Report& report, const std::string& path);

struct SuiteOptions {
  std::uint64_t seed = 20240601;
  std::size_t threads = 1;
  std::size_t lemma52_trials = 1000;
  std::size_t lemma53_draws = 100000;
  std::size_t lemma54_histories = 100;
  std::size_t lemma54_draws = 1000000;
};

Report run_lemma52(const SuiteOptions& options);
Report run_lemma53(const SuiteOptions& options);
Report run_lemma54(const SuiteOptions& options);
Report run_bounds(const SuiteOptions& options);

/// suite in {lemma52, lemma53, lemma54, bounds, all}; throws ConfigError otherwise.
std::vector<Report> run_suite(const std::string& suite, const SuiteOptions& options);

}  // namespace linreboot::verify

#endif  // LINREBOOT_VERIFIER_HPP_
