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

#include "linreboot/optimism.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "linreboot/errors.hpp"

namespace linreboot::optimism {
namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1 / sqrt(2 pi)

void require_budget(double value, const char* what) {
  if (!(value > 0.0 && value < 1.0)) {
    throw ConfigError(std::string(what) + " must lie in (0, 1), got " +
                      std::to_string(value));
  }
}

double budget_at(const std::vector<double>& budgets, std::size_t k,
                 const char* what) {
  if (k >= budgets.size()) {
    throw ConfigError(std::string(what) + ": no budget for arm " + std::to_string(k));
  }
  return budgets[k];
}

// sqrt(2 (n - K) d log(1 + sum sigma_i^2 / (d lambda)))
double norm_sum_bound(std::size_t n, std::size_t dim, double lambda,
                      const EnvSummary& summary) {
  if (n <= summary.n_arms) return 0.0;
  double sq = 0.0;
  for (const double s : summary.singular_values) sq += s * s;
  const double d = static_cast<double>(dim);
  const double rounds = static_cast<double>(n - summary.n_arms);
  return std::sqrt(2.0 * rounds * d * std::log1p(sq / (d * lambda)));
}

}  // namespace

double OptimismParams::alpha_sum() const {
  return std::accumulate(alpha.begin(), alpha.end(), 0.0);
}
double OptimismParams::beta_sum() const {
  return std::accumulate(beta.begin(), beta.end(), 0.0);
}
double OptimismParams::alpha_min() const {
  return alpha.empty() ? 0.0 : *std::min_element(alpha.begin(), alpha.end());
}
double OptimismParams::beta_min() const {
  return beta.empty() ? 0.0 : *std::min_element(beta.begin(), beta.end());
}

void OptimismParams::validate() const {
  if (dim == 0) throw ConfigError("optimism: dim must be at least 1");
  if (!(lambda > 0.0)) throw ConfigError("optimism: lambda must be positive");
  if (!(l1 > 0.0) || l1 > l2) throw ConfigError("optimism: need 0 < l1 <= l2");
  if (!(b > 0.0)) throw ConfigError("optimism: b must be positive");
  if (!(sigma_omega >= 0.0)) throw ConfigError("optimism: sigma_omega must be nonnegative");
  for (const double a : alpha) require_budget(a, "optimism: alpha_k");
  for (const double v : beta) require_budget(v, "optimism: beta_k");
  require_budget(gamma, "optimism: gamma");
  require_budget(delta, "optimism: delta");
}

OptimismParams with_uniform_budgets(OptimismParams params, std::size_t n_arms,
                                    double alpha_k, double beta_k) {
  params.alpha.assign(n_arms, alpha_k);
  params.beta.assign(n_arms, beta_k);
  return params;
}

double sample_optimism(double t, std::size_t dim, double alpha_k, double l2,
                       double context_bound, double lambda, double s2) {
  require_budget(alpha_k, "c1: alpha_k");
  const double arg =
      (1.0 + t * context_bound * context_bound / lambda) / alpha_k;
  return l2 * std::sqrt(static_cast<double>(dim) * std::log(arg)) +
         std::sqrt(lambda) * s2;
}

double c1(std::size_t t, std::size_t k, const OptimismParams& params) {
  if (t < 1) throw ConfigError("c1: t must be at least 1");
  return sample_optimism(static_cast<double>(t), params.dim,
                         budget_at(params.alpha, k, "c1"), params.l2,
                         params.context_bound, params.lambda, params.s2);
}

double c2(std::size_t /*t*/, std::size_t k, double rss, std::size_t s,
          double norm, const OptimismParams& params) {
  if (s == 0) throw ConfigError("c2: arm has no observations");
  if (!(norm > 0.0)) throw ConfigError("c2: context norm must be positive");
  const double beta_k = budget_at(params.beta, k, "c2");
  require_budget(beta_k, "c2: beta_k");
  const double sd = static_cast<double>(s);
  const double num = 2.0 * params.sigma_omega * params.sigma_omega *
                     std::max(rss, 0.0) * std::log(2.0 / beta_k);
  return std::sqrt(num / (sd * sd * norm * norm));
}

bool check_ratio_b(double c1_val, double c2_val, double beta_1, double b) {
  return c1_val / c2_val >= b * std::sqrt(2.0 * std::log(2.0 / beta_1));
}

double gaussian_upper_tail(double u) {
  return 0.5 * std::erfc(u / std::numbers::sqrt2);
}

double standardized_threshold(double c1_val, std::size_t s, double norm,
                              double rss, double sigma_omega) {
  const double scale = sigma_omega * std::sqrt(std::max(rss, 0.0));
  const double num = c1_val * static_cast<double>(s) * norm;
  if (scale == 0.0) return num > 0.0 ? INFINITY : 0.0;
  return num / scale;
}

double anti_concentration_lower_bound(double c1_val, std::size_t s, double norm,
                                      double rss, double sigma_omega, double b) {
  const double u = standardized_threshold(c1_val, s, norm, rss, sigma_omega);
  if (u >= b) return b * kInvSqrt2Pi * std::exp(-1.5 * u * u);
  return gaussian_upper_tail(b);
}

double bootstrap_coverage_exact(double beta_k) {
  require_budget(beta_k, "coverage: beta_k");
  return 1.0 - 2.0 * gaussian_upper_tail(std::sqrt(2.0 * std::log(2.0 / beta_k)));
}

EnvSummary summarize_contexts(const linalg::MatrixRef& contexts,
                              std::size_t optimal_row) {
  if (optimal_row >= static_cast<std::size_t>(contexts.rows())) {
    throw DimensionError("summarize_contexts: optimal row out of range");
  }
  EnvSummary out;
  out.n_arms = static_cast<std::size_t>(contexts.rows());
  out.singular_values = linalg::context_spectrum(contexts).singular_values;
  out.x1_norm = contexts.row(static_cast<Eigen::Index>(optimal_row)).norm();
  return out;
}

void apply_spectrum(OptimismParams& params, const EnvSummary& summary) {
  params.rank = summary.singular_values.size();
  params.sigma_max = summary.singular_values.empty() ? 0.0 : summary.singular_values.front();
  params.sigma_min = summary.singular_values.empty() ? 0.0 : summary.singular_values.back();
}

AnalysisConstants analysis_constants(const OptimismParams& params,
                                     const EnvSummary& summary) {
  params.validate();
  if (!(params.s1 > 0.0)) {
    throw ConfigError("analysis constants: S1 must be positive");
  }
  AnalysisConstants k;
  const double smax2 = params.sigma_max * params.sigma_max;
  const double shrink = params.lambda / (smax2 + params.lambda);
  const double q = shrink * shrink * params.s1 * params.s1 * params.l1;
  const double upper = smax2 * params.s2 * params.s2 * params.l2;

  k.log_m1 = 2.0 * std::log(std::numbers::e - 1.0) + 8.0 * upper / q - 6.0;
  k.m1 = std::exp(k.log_m1);
  k.m2 = (4.0 * upper - 2.0 * q) / (q * q);
  if (std::log1p(-params.gamma) >= k.log_m1) {
    throw ConfigError("analysis constants: 1 - gamma >= M1, log argument invalid");
  }
  if (!(k.m2 > 0.0)) throw ConfigError("analysis constants: M2 must be positive");

  const double denom =
      params.b * kInvSqrt2Pi *
          std::exp(-0.375 * summary.x1_norm * summary.x1_norm * params.rho) -
      params.beta_sum();
  if (!(denom > 0.0)) {
    throw ConfigError(
        "analysis constants: b / sqrt(2 pi) exp(-3/8 ||x1||^2 rho) must exceed beta");
  }
  k.c1 = 2.0 / denom + 1.0;
  const double r = static_cast<double>(params.rank);
  k.c2 = k.c1 * std::numbers::sqrt2 *
         (params.l2 * std::sqrt(r * std::log1p(smax2 / params.lambda) +
                                2.0 * std::log(1.0 / params.delta)) +
          std::sqrt(params.lambda) * params.s2);
  return k;
}

RegretBound regret_bound_terms(std::size_t n, std::size_t dim,
                               const OptimismParams& params,
                               const EnvSummary& summary) {
  RegretBound out;
  const double k_arms = static_cast<double>(summary.n_arms);
  const double nd = static_cast<double>(n);
  const double norms = norm_sum_bound(n, dim, params.lambda, summary);
  const double so2 = params.sigma_omega * params.sigma_omega;

  if (norms > 0.0) {
    out.zeta1 = sample_optimism(nd, dim, params.alpha_min(), params.l2,
                                params.context_bound, params.lambda, params.s2) *
                norms;
    out.zeta2 = std::sqrt(2.0 * so2 * std::log(2.0 / params.beta_min())) * norms;
  }
  const double beta_min = params.beta_min();
  out.zeta3 = beta_min > 0.0
                  ? 2.0 * k_arms *
                        std::sqrt(4.0 * params.l2 * so2 * std::log(2.0 / beta_min)) *
                        (std::log(nd) + 1.0)
                  : 0.0;
  const double rounds = n > summary.n_arms ? nd - k_arms : 0.0;
  out.zeta4 = 2.0 * params.s2 * params.context_bound *
              (rounds * (params.alpha_sum() + params.beta_sum()) + k_arms - 1.0);
  return out;
}

RegretBound regret_bound_eval(std::size_t n, std::size_t dim,
                              const OptimismParams& params,
                              const EnvSummary& summary) {
  if (n < summary.n_arms) {
    throw ConfigError("regret bound: horizon must be at least the number of arms");
  }
  RegretBound out = regret_bound_terms(n, dim, params, summary);
  out.constants = analysis_constants(params, summary);
  const auto& k = out.constants;
  out.total = k.c1 * out.zeta1 + k.c2 * out.zeta2 + k.c1 * out.zeta3 + out.zeta4;
  return out;
}

double rho_scale(const OptimismParams& params, const AnalysisConstants& k) {
  const double log_ratio = k.log_m1 - std::log1p(-params.gamma);
  return params.sigma_omega * params.sigma_omega *
         (params.sigma_min * params.sigma_min + params.lambda) *
         std::sqrt(log_ratio / k.m2);
}

bool check_rho_condition(std::size_t /*t*/, std::size_t s1_count, double c1_val,
                         const OptimismParams& params,
                         const EnvSummary& summary) {
  const AnalysisConstants k = analysis_constants(params, summary);
  const double lhs = std::pow(static_cast<double>(s1_count), 1.5) * c1_val * c1_val;
  const double rhs = params.rho * rho_scale(params, k);
  return lhs <= rhs * (1.0 + 1e-12);
}

namespace {

double good_event_exponent(std::size_t s1_count, double c1_val,
                           const OptimismParams& params,
                           const EnvSummary& summary) {
  const AnalysisConstants k = analysis_constants(params, summary);
  const double num = 3.0 * std::pow(static_cast<double>(s1_count), 1.5) *
                     c1_val * c1_val * summary.x1_norm * summary.x1_norm;
  return -num / (8.0 * rho_scale(params, k));
}

}  // namespace

double good_event_lower_bound(std::size_t s1_count, double c1_val,
                              const OptimismParams& params,
                              const EnvSummary& summary) {
  return params.b * kInvSqrt2Pi *
             std::exp(good_event_exponent(s1_count, c1_val, params, summary)) -
         params.beta_sum();
}

bool check_b_condition(std::size_t s1_count, double c1_val,
                       const OptimismParams& params, const EnvSummary& summary) {
  const double lhs = params.b * kInvSqrt2Pi *
                     std::exp(good_event_exponent(s1_count, c1_val, params, summary));
  const double rhs = std::min(gaussian_upper_tail(params.b),
                              params.b * kInvSqrt2Pi * std::exp(-1.5 * params.b * params.b));
  return lhs < rhs;
}

}  // namespace linreboot::optimism
