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

// Closed-form optimism radii, anti-concentration bounds, and the constants of
// the LinReBoot regret bound. Everything here is a pure function of its
// arguments.

#ifndef LINREBOOT_OPTIMISM_HPP_
#define LINREBOOT_OPTIMISM_HPP_

#include <cstddef>
#include <vector>

#include "linreboot/linalg.hpp"

namespace linreboot::optimism {

/// Theory constants.
///
/// `l2` is used as the sub-Gaussian scale of the reward noise in the sample
/// radius; for N(0, s^2) noise the natural value is s. `l1 <= l2` is the
/// matching lower moment-generating-function constant.
struct OptimismParams {
  std::size_t dim = 1;
  double lambda = 0.1;
  double context_bound = 1.0;  // L
  double l1 = 0.31622776601683794;
  double l2 = 0.31622776601683794;
  double s1 = 0.0;  // shrinkage lower bound
  double s2 = 1.0;  // parameter-norm bound
  double sigma_omega = 0.3;
  std::vector<double> alpha;  // per-arm sample budgets
  std::vector<double> beta;   // per-arm bootstrap budgets
  double b = 1.0;
  double gamma = 0.05;
  double delta = 0.05;
  double rho = 1.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  std::size_t rank = 0;

  double alpha_sum() const;
  double beta_sum() const;
  double alpha_min() const;
  double beta_min() const;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Uniform per-arm budgets.
OptimismParams with_uniform_budgets(OptimismParams params, std::size_t n_arms,
                                    double alpha_k, double beta_k);

/// Raw sample radius L2 sqrt(d log((1 + t L^2 / lambda) / alpha)) + sqrt(lambda) S2.
double sample_optimism(double t, std::size_t dim, double alpha_k, double l2,
                       double context_bound, double lambda, double s2);

/// c1(t, k). Throws ConfigError when alpha_k is outside (0, 1).
double c1(std::size_t t, std::size_t k, const OptimismParams& params);

/// c2(t, k) = sqrt(2 sigma_omega^2 rss log(2 / beta_k) / (s^2 norm^2)).
/// Throws ConfigError for norm <= 0 or s == 0.
double c2(std::size_t t, std::size_t k, double rss, std::size_t s, double norm,
          const OptimismParams& params);

/// c1 / c2 >= b sqrt(2 log(2 / beta_1)).
bool check_ratio_b(double c1_val, double c2_val, double beta_1, double b);

/// Phi(-u).
double gaussian_upper_tail(double u);

/// Standardized threshold u = c1 s norm / (sigma_omega sqrt(rss)) at which the
/// bootstrap index of the optimal arm must exceed its fitted mean.
double standardized_threshold(double c1_val, std::size_t s, double norm,
                              double rss, double sigma_omega);

/// Lower bound on P(index - mu_hat > c1 * norm):
///   (b / sqrt(2 pi)) exp(-3 u^2 / 2)  when u >= b,
///   Phi(-b)                           otherwise.
double anti_concentration_lower_bound(double c1_val, std::size_t s, double norm,
                                      double rss, double sigma_omega, double b);

/// Exact conditional coverage of the bootstrap radius: 1 - 2 Phi(-sqrt(2 log(2 / beta))).
double bootstrap_coverage_exact(double beta_k);

/// Spectral summary of the forced-initialization context matrix X_K.
struct EnvSummary {
  std::size_t n_arms = 0;
  std::vector<double> singular_values;
  double x1_norm = 1.0;  // 2-norm of the optimal arm's context
};

EnvSummary summarize_contexts(const linalg::MatrixRef& contexts,
                              std::size_t optimal_row);

/// Copies sigma_min, sigma_max and rank from a summary into params.
void apply_spectrum(OptimismParams& params, const EnvSummary& summary);

struct AnalysisConstants {
  double log_m1 = 0.0;  // M1 overflows double for realistic inputs
  double m1 = 0.0;      // exp(log_m1), possibly +inf
  double m2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

/// M1, M2, C1, C2. Throws ConfigError when 1 - gamma >= M1, M2 <= 0,
/// S1 <= 0, or the C1 denominator is not positive.
AnalysisConstants analysis_constants(const OptimismParams& params,
                                     const EnvSummary& summary);

struct RegretBound {
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double zeta3 = 0.0;
  double zeta4 = 0.0;
  AnalysisConstants constants;
  double total = 0.0;  // C1 zeta1 + C2 zeta2 + C1 zeta3 + zeta4
};

RegretBound regret_bound_eval(std::size_t n, std::size_t dim,
                              const OptimismParams& params,
                              const EnvSummary& summary);

/// The zeta terms alone (no validity checks on M1, M2, C1).
RegretBound regret_bound_terms(std::size_t n, std::size_t dim,
                               const OptimismParams& params,
                               const EnvSummary& summary);

/// sigma_omega^2 (sigma_min^2 + lambda) sqrt(log(M1 / (1 - gamma)) / M2).
double rho_scale(const OptimismParams& params, const AnalysisConstants& k);

/// s^{3/2} c1^2 <= rho * rho_scale. The comparison is inclusive up to a
/// relative slack of 1e-12.
bool check_rho_condition(std::size_t t, std::size_t s1_count, double c1_val,
                         const OptimismParams& params,
                         const EnvSummary& summary);

/// High-probability lower bound on P(good) - P(bad bootstrap):
///   (b / sqrt(2 pi)) exp(-3 s^{3/2} c1^2 ||x1||^2 / (8 rho_scale)) - beta.
double good_event_lower_bound(std::size_t s1_count, double c1_val,
                              const OptimismParams& params,
                              const EnvSummary& summary);

/// (b / sqrt(2 pi)) exp(...) < min(Phi(-b), (b / sqrt(2 pi)) exp(-3 b^2 / 2)).
bool check_b_condition(std::size_t s1_count, double c1_val,
                       const OptimismParams& params, const EnvSummary& summary);

}  // namespace linreboot::optimism

#endif  // LINREBOOT_OPTIMISM_HPP_
