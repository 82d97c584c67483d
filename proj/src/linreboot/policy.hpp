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

// Arm-selection policies sharing one observe/select interface.
//
// All index policies pull arm t-1 (0-based) in rounds t = 1..K, then pick
// argmax_k index_k with ties going to the lowest arm. Shared-parameter
// settings keep one Gram matrix; the Covariates setting keeps one per arm.

#ifndef LINREBOOT_POLICY_HPP_
#define LINREBOOT_POLICY_HPP_

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "linreboot/environment.hpp"
#include "linreboot/linalg.hpp"
#include "linreboot/rng.hpp"

namespace linreboot {

struct ArmStats {
  std::size_t count = 0;
  double reward_sum = 0.0;
  double reward_sq_sum = 0.0;
};

struct PolicyContext {
  Setting setting = Setting::kStochastic;
  std::size_t dim = 0;
  std::size_t n_arms = 0;
  double lambda = 0.1;

  bool per_arm_models() const { return setting == Setting::kCovariates; }
};

struct PolicyState {
  std::vector<linalg::GramState> grams;  // 1 shared, or one per arm
  std::vector<ArmStats> arms;
  // Per-arm reward sequences; empty vectors unless the policy retains them.
  std::vector<std::vector<double>> reward_logs;
  bool retain_logs = false;

  std::size_t group_of(std::size_t arm) const {
    return grams.size() == 1 ? 0 : arm;
  }
  const linalg::GramState& gram_for(std::size_t arm) const {
    return grams[group_of(arm)];
  }
};

struct BootstrapIndex {
  double mu_hat = 0.0;
  double bonus = 0.0;
  double mu_tilde = 0.0;
  double rss = 0.0;
};

/// Sum r^2 + s mu^2 - 2 mu sum r, clamped at zero. Throws ConfigError for s == 0.
double incremental_rss(double reward_sum, double reward_sq_sum, std::size_t s,
                       double mu_hat);

/// Residual bootstrap by explicit weights: bonus = s^{-1} sum_i w_i (r_i - mu_hat)
/// with w_i ~ N(0, sigma_omega^2). Requires the arm's reward log.
BootstrapIndex reboot_index_naive(const PolicyState& state, std::size_t arm,
                                  double mu_hat, double sigma_omega, Rng& rng);

/// Same law as the naive path, drawn in one step:
/// mu_tilde ~ N(mu_hat, sigma_omega^2 rss / s^2).
BootstrapIndex reboot_index_efficient(const PolicyState& state, std::size_t arm,
                                      double mu_hat, double sigma_omega, Rng& rng);

class Policy {
 public:
  Policy(std::string name, const PolicyContext& ctx, double gram_lambda,
         bool retain_logs);
  virtual ~Policy() = default;
  Policy(const Policy&) = delete;
  Policy& operator=(const Policy&) = delete;

  const std::string& name() const { return name_; }
  const PolicyContext& context() const { return ctx_; }
  const PolicyState& state() const { return state_; }

  /// round is 1-based.
  virtual std::size_t select_arm(const RoundContexts& rc, std::size_t round,
                                 Rng& rng);

  /// Throws DimensionError on a context length mismatch and
  /// std::out_of_range on a bad arm.
  void observe(std::size_t arm, const linalg::VectorRef& context, double reward);

  /// Per-arm indices after forced initialization.
  virtual linalg::Vector indices(const RoundContexts& rc, std::size_t round,
                                 Rng& rng) = 0;

  /// Fitted mean x_k' theta_hat for every arm, using the arm's model.
  linalg::Vector fitted_means(const RoundContexts& rc) const;

 protected:
  virtual void on_observe(std::size_t /*arm*/, const linalg::VectorRef& /*context*/,
                          double /*reward*/) {}

  PolicyState state_;

 private:
  std::string name_;
  PolicyContext ctx_;
};

/// Lowest index among maxima.
std::size_t argmax_lowest(const linalg::VectorRef& values);

enum class SamplerPath { kEfficient, kNaive };

class LinReBoot final : public Policy {
 public:
  LinReBoot(const PolicyContext& ctx, double sigma_omega,
            SamplerPath path = SamplerPath::kEfficient);

  linalg::Vector indices(const RoundContexts& rc, std::size_t round,
                         Rng& rng) override;
  /// Index together with its bootstrap decomposition.
  std::vector<BootstrapIndex> bootstrap_indices(const RoundContexts& rc, Rng& rng) const;

  double sigma_omega() const { return sigma_omega_; }
  SamplerPath path() const { return path_; }

 private:
  double sigma_omega_;
  SamplerPath path_;
};

/// Gaussian-prior Thompson sampling: theta ~ N(theta_hat, scale^2 V^{-1}).
class LinTSGaussian final : public Policy {
 public:
  LinTSGaussian(const PolicyContext& ctx, double scale);
  linalg::Vector indices(const RoundContexts& rc, std::size_t round,
                         Rng& rng) override;

 private:
  double scale_;
};

/// Normal-inverse-gamma Thompson sampling with prior precision I / tau2 and
/// noise variance ~ InvGamma(a0, b0).
class LinTSInverseGamma final : public Policy {
 public:
  LinTSInverseGamma(const PolicyContext& ctx, double a0, double b0, double tau2);
  linalg::Vector indices(const RoundContexts& rc, std::size_t round,
                         Rng& rng) override;

 private:
  double a0_;
  double b0_;
};

/// Stored (context, target) rows of one model group.
struct RowHistory {
  std::vector<double> rows;  // row-major, dim columns
  std::vector<double> targets;
  std::size_t size() const { return targets.size(); }
};

/// Perturbed-history exploration with Binomial pseudo rewards in {-B, +B}.
class LinPHE final : public Policy {
 public:
  LinPHE(const PolicyContext& ctx, double a, double reward_bound);
  linalg::Vector indices(const RoundContexts& rc, std::size_t round,
                         Rng& rng) override;

  /// Number of pseudo trials drawn for a group with m rows: ceil(a m).
  static std::size_t pseudo_trials(double a, std::size_t m);

 protected:
  void on_observe(std::size_t arm, const linalg::VectorRef& context,
                  double reward) override;

 private:
  linalg::Vector perturbed_theta(std::size_t group, Rng& rng) const;

  double a_;
  double bound_;
  std::vector<RowHistory> history_;
  std::vector<linalg::GramState> scaled_grams_;  // (1 + a) X'X + lambda I
  std::vector<linalg::Vector> row_sums_;
};

/// Bootstrap over history augmented with +B / -B pseudo rows at every pull.
class LinGIRO final : public Policy {
 public:
  LinGIRO(const PolicyContext& ctx, std::size_t a, double reward_bound);
  linalg::Vector indices(const RoundContexts& rc, std::size_t round,
                         Rng& rng) override;
  const RowHistory& history(std::size_t group) const { return history_[group]; }

 protected:
  void on_observe(std::size_t arm, const linalg::VectorRef& context,
                  double reward) override;

 private:
  linalg::Vector resampled_theta(std::size_t group, Rng& rng) const;

  std::size_t a_;
  double bound_;
  std::vector<RowHistory> history_;
};

struct LinUCBParams {
  double confidence = 0.95;
  double l2 = 0.31622776601683794;
  double s2 = 1.0;
  double context_bound = 1.0;
};

/// x' theta_hat + c1(t; alpha = 1 - confidence) ||x||_{V^{-1}}.
class LinUCB final : public Policy {
 public:
  LinUCB(const PolicyContext& ctx, const LinUCBParams& params);
  linalg::Vector indices(const RoundContexts& rc, std::size_t round,
                         Rng& rng) override;

 private:
  LinUCBParams params_;
};

/// Reference stub: always pulls the round's best arm.
class OraclePolicy final : public Policy {
 public:
  explicit OraclePolicy(const PolicyContext& ctx);
  std::size_t select_arm(const RoundContexts& rc, std::size_t round,
                         Rng& rng) override;
  linalg::Vector indices(const RoundContexts& rc, std::size_t round,
                         Rng& rng) override;
};

/// Reference stub: uniformly random arm every round.
class UniformPolicy final : public Policy {
 public:
  explicit UniformPolicy(const PolicyContext& ctx);
  std::size_t select_arm(const RoundContexts& rc, std::size_t round,
                         Rng& rng) override;
  linalg::Vector indices(const RoundContexts& rc, std::size_t round,
                         Rng& rng) override;
};

/// indices(...)[arm] for any index policy.
double baseline_index(Policy& policy, std::size_t arm, const RoundContexts& rc,
                      std::size_t round, Rng& rng);

}  // namespace linreboot

#endif  // LINREBOOT_POLICY_HPP_
