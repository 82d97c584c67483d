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

#include "linreboot/policy.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <cmath>
#include <stdexcept>
#include <string>

#include "linreboot/errors.hpp"
#include "linreboot/optimism.hpp"

namespace linreboot {

using linalg::Matrix;
using linalg::Vector;

double incremental_rss(double reward_sum, double reward_sq_sum, std::size_t s,
                       double mu_hat) {
  if (s == 0) throw ConfigError("incremental_rss: arm has no observations");
  // Within-arm spread plus the shift from the arm mean to mu_hat.
  const double n = static_cast<double>(s);
  const double mean = reward_sum / n;
  const double spread = std::max(std::fma(-reward_sum, mean, reward_sq_sum), 0.0);
  const double shift = mean - mu_hat;
  return spread + n * shift * shift;
}

BootstrapIndex reboot_index_naive(const PolicyState& state, std::size_t arm,
                                  double mu_hat, double sigma_omega, Rng& rng) {
  if (!state.retain_logs) {
    throw ConfigError("reboot_index_naive: reward log not retained");
  }
  const auto& log = state.reward_logs.at(arm);
  if (log.empty()) throw ConfigError("reboot_index_naive: arm has no observations");

  std::normal_distribution<double> gauss(0.0, 1.0);
  double weighted = 0.0;
  double rss = 0.0;
  for (const double r : log) {
    const double e = r - mu_hat;
    weighted += sigma_omega * gauss(rng) * e;
    rss += e * e;
  }
  BootstrapIndex out;
  out.mu_hat = mu_hat;
  out.bonus = weighted / static_cast<double>(log.size());
  out.mu_tilde = out.mu_hat + out.bonus;
  out.rss = rss;
  return out;
}

BootstrapIndex reboot_index_efficient(const PolicyState& state, std::size_t arm,
                                      double mu_hat, double sigma_omega, Rng& rng) {
  const ArmStats& st = state.arms.at(arm);
  BootstrapIndex out;
  out.mu_hat = mu_hat;
  out.rss = incremental_rss(st.reward_sum, st.reward_sq_sum, st.count, mu_hat);
  const double sd =
      sigma_omega * std::sqrt(out.rss) / static_cast<double>(st.count);
  std::normal_distribution<double> gauss(0.0, 1.0);
  out.bonus = sd * gauss(rng);
  out.mu_tilde = out.mu_hat + out.bonus;
  return out;
}

std::size_t argmax_lowest(const linalg::VectorRef& values) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > values(best)) best = i;
  }
  return static_cast<std::size_t>(best);
}

Policy::Policy(std::string name, const PolicyContext& ctx, double gram_lambda,
               bool retain_logs)
    : name_(std::move(name)), ctx_(ctx) {
  if (ctx.n_arms < 2) throw ConfigError(name_ + ": need at least 2 arms");
  const std::size_t groups = ctx.per_arm_models() ? ctx.n_arms : 1;
  state_.grams.assign(groups, linalg::GramState(ctx.dim, gram_lambda));
  state_.arms.assign(ctx.n_arms, ArmStats{});
  state_.reward_logs.assign(ctx.n_arms, {});
  state_.retain_logs = retain_logs;
}

std::size_t Policy::select_arm(const RoundContexts& rc, std::size_t round,
                               Rng& rng) {
  if (round == 0) throw std::invalid_argument("select_arm: rounds are 1-based");
  if (round <= ctx_.n_arms) return round - 1;
  return argmax_lowest(indices(rc, round, rng));
}

void Policy::observe(std::size_t arm, const linalg::VectorRef& context,
                     double reward) {
  if (arm >= ctx_.n_arms) {
    throw std::out_of_range(name_ + ": arm " + std::to_string(arm) + " out of range");
  }
  if (static_cast<std::size_t>(context.size()) != ctx_.dim) {
    throw DimensionError(name_ + ": context has length " +
                         std::to_string(context.size()) + ", expected " +
                         std::to_string(ctx_.dim));
  }
  ArmStats& st = state_.arms[arm];
  ++st.count;
  st.reward_sum += reward;
  st.reward_sq_sum += reward * reward;
  if (state_.retain_logs) state_.reward_logs[arm].push_back(reward);
  state_.grams[state_.group_of(arm)].update(context, reward);
  on_observe(arm, context, reward);
}

Vector Policy::fitted_means(const RoundContexts& rc) const {
  const auto k = static_cast<Eigen::Index>(ctx_.n_arms);
  if (state_.grams.size() == 1) return rc.contexts * state_.grams[0].ridge_fit();
  Vector out(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    out(a) = rc.contexts.row(a).dot(state_.grams[static_cast<std::size_t>(a)].ridge_fit());
  }
  return out;
}

double baseline_index(Policy& policy, std::size_t arm, const RoundContexts& rc,
                      std::size_t round, Rng& rng) {
  const Vector idx = policy.indices(rc, round, rng);
  if (arm >= static_cast<std::size_t>(idx.size())) {
    throw std::out_of_range("baseline_index: arm out of range");
  }
  return idx(static_cast<Eigen::Index>(arm));
}

// ---------------------------------------------------------------------------
// LinReBoot

LinReBoot::LinReBoot(const PolicyContext& ctx, double sigma_omega,
                     SamplerPath path)
    : Policy("LinReBoot", ctx, ctx.lambda, path == SamplerPath::kNaive),
      sigma_omega_(sigma_omega),
      path_(path) {
  if (!(sigma_omega >= 0.0)) throw ConfigError("LinReBoot: sigma_omega must be >= 0");
}

std::vector<BootstrapIndex> LinReBoot::bootstrap_indices(const RoundContexts& rc,
                                                         Rng& rng) const {
  const Vector mu_hat = fitted_means(rc);
  std::vector<BootstrapIndex> out;
  out.reserve(context().n_arms);
  for (std::size_t a = 0; a < context().n_arms; ++a) {
    const double m = mu_hat(static_cast<Eigen::Index>(a));
    out.push_back(path_ == SamplerPath::kNaive
                      ? reboot_index_naive(state_, a, m, sigma_omega_, rng)
                      : reboot_index_efficient(state_, a, m, sigma_omega_, rng));
  }
  return out;
}

Vector LinReBoot::indices(const RoundContexts& rc, std::size_t /*round*/, Rng& rng) {
  const auto boot = bootstrap_indices(rc, rng);
  Vector out(static_cast<Eigen::Index>(boot.size()));
  for (std::size_t a = 0; a < boot.size(); ++a) {
    out(static_cast<Eigen::Index>(a)) = boot[a].mu_tilde;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Thompson sampling

namespace {

Vector standard_normal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = gauss(rng);
  return z;
}

// mean + scale * chol(cov) z
Vector gaussian_draw(const Vector& mean, const Matrix& cov, double scale, Rng& rng) {
  if (scale == 0.0) return mean;
  const Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw RuntimeError("posterior covariance is not positive definite");
  }
  const Vector step = llt.matrixL() * standard_normal(mean.size(), rng);
  return mean + scale * step;
}

}  // namespace

LinTSGaussian::LinTSGaussian(const PolicyContext& ctx, double scale)
    : Policy("LinTS-G", ctx, ctx.lambda, false), scale_(scale) {
  if (!(scale >= 0.0)) throw ConfigError("LinTS-G: scale must be >= 0");
}

Vector LinTSGaussian::indices(const RoundContexts& rc, std::size_t /*round*/,
                              Rng& rng) {
  const auto k = static_cast<Eigen::Index>(context().n_arms);
  if (state_.grams.size() == 1) {
    const auto& g = state_.grams[0];
    return rc.contexts * gaussian_draw(g.ridge_fit(), g.gram_inverse(), scale_, rng);
  }
  Vector out(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    const auto& g = state_.grams[static_cast<std::size_t>(a)];
    out(a) = rc.contexts.row(a).dot(
        gaussian_draw(g.ridge_fit(), g.gram_inverse(), scale_, rng));
  }
  return out;
}

LinTSInverseGamma::LinTSInverseGamma(const PolicyContext& ctx, double a0,
                                     double b0, double tau2)
    : Policy("LinTS-IG", ctx, tau2 > 0.0 ? 1.0 / tau2 : -1.0, false),
      a0_(a0),
      b0_(b0) {
  if (!(a0 > 0.0) || !(b0 > 0.0)) throw ConfigError("LinTS-IG: a0 and b0 must be positive");
}

Vector LinTSInverseGamma::indices(const RoundContexts& rc, std::size_t /*round*/,
                                  Rng& rng) {
  const auto k = static_cast<Eigen::Index>(context().n_arms);
  auto draw = [&](std::size_t group, double yy) {
    const auto& g = state_.grams[group];
    const Vector mu = g.ridge_fit();
    const double n = static_cast<double>(g.num_updates());
    const double b_n = b0_ + 0.5 * std::max(yy - mu.dot(g.cross_moment()), 0.0);
    std::gamma_distribution<double> gamma(a0_ + 0.5 * n, 1.0 / b_n);
    const double variance = 1.0 / gamma(rng);
    return gaussian_draw(mu, g.gram_inverse(), std::sqrt(variance), rng);
  };

  if (state_.grams.size() == 1) {
    double yy = 0.0;
    for (const auto& st : state_.arms) yy += st.reward_sq_sum;
    return rc.contexts * draw(0, yy);
  }
  Vector out(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    const auto arm = static_cast<std::size_t>(a);
    out(a) = rc.contexts.row(a).dot(draw(arm, state_.arms[arm].reward_sq_sum));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Perturbed history

namespace {

void append_row(RowHistory& h, const linalg::VectorRef& x, double target) {
  h.rows.insert(h.rows.end(), x.data(), x.data() + x.size());
  h.targets.push_back(target);
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> rows_of(const RowHistory& h, std::size_t dim) {
  return {h.rows.data(), static_cast<Eigen::Index>(h.size()),
          static_cast<Eigen::Index>(dim)};
}

Vector group_indices(const PolicyState& state, const RoundContexts& rc,
                     const std::function<Vector(std::size_t)>& theta_for) {
  const auto k = static_cast<Eigen::Index>(state.arms.size());
  if (state.grams.size() == 1) return rc.contexts * theta_for(0);
  Vector out(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    out(a) = rc.contexts.row(a).dot(theta_for(static_cast<std::size_t>(a)));
  }
  return out;
}

}  // namespace

LinPHE::LinPHE(const PolicyContext& ctx, double a, double reward_bound)
    : Policy("LinPHE", ctx, ctx.lambda, true), a_(a), bound_(reward_bound) {
  if (!(a > 0.0)) throw ConfigError("LinPHE: a must be positive");
  if (!(reward_bound > 0.0)) throw ConfigError("LinPHE: reward_bound must be positive");
  const std::size_t groups = state_.grams.size();
  history_.resize(groups);
  scaled_grams_.assign(groups, linalg::GramState(ctx.dim, ctx.lambda));
  row_sums_.assign(groups, Vector::Zero(static_cast<Eigen::Index>(ctx.dim)));
}

std::size_t LinPHE::pseudo_trials(double a, std::size_t m) {
  // Guard against products such as 0.1 * 30 = 3.0000000000000004.
  return static_cast<std::size_t>(std::ceil(a * static_cast<double>(m) - 1e-9));
}

void LinPHE::on_observe(std::size_t arm, const linalg::VectorRef& context,
                        double reward) {
  const std::size_t g = state_.group_of(arm);
  append_row(history_[g], context, reward);
  scaled_grams_[g].update(std::sqrt(1.0 + a_) * context, 0.0);
  row_sums_[g] += context;
}

Vector LinPHE::perturbed_theta(std::size_t group, Rng& rng) const {
  const RowHistory& h = history_[group];
  const std::size_t m = h.size();
  // sum_i x_i (y_i + sum of pseudo rewards in {-B, +B} placed on row i)
  Vector target = state_.grams[group].cross_moment() - (a_ * bound_) * row_sums_[group];
  if (m > 0) {
    std::binomial_distribution<std::size_t> successes(pseudo_trials(a_, m), 0.5);
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    const auto rows = rows_of(h, context().dim);
    const std::size_t n = successes(rng);
    for (std::size_t j = 0; j < n; ++j) {
      target += (2.0 * bound_) * rows.row(static_cast<Eigen::Index>(pick(rng))).transpose();
    }
  }
  return scaled_grams_[group].gram_inverse() * target;
}

Vector LinPHE::indices(const RoundContexts& rc, std::size_t /*round*/, Rng& rng) {
  return group_indices(state_, rc, [&](std::size_t g) { return perturbed_theta(g, rng); });
}

LinGIRO::LinGIRO(const PolicyContext& ctx, std::size_t a, double reward_bound)
    : Policy("LinGIRO", ctx, ctx.lambda, true), a_(a), bound_(reward_bound) {
  if (a == 0) throw ConfigError("LinGIRO: a must be a positive integer");
  if (!(reward_bound > 0.0)) throw ConfigError("LinGIRO: reward_bound must be positive");
  history_.resize(state_.grams.size());
}

void LinGIRO::on_observe(std::size_t arm, const linalg::VectorRef& context,
                         double reward) {
  RowHistory& h = history_[state_.group_of(arm)];
  append_row(h, context, reward);
  for (std::size_t i = 0; i < a_; ++i) {
    append_row(h, context, bound_);
    append_row(h, context, -bound_);
  }
}

Vector LinGIRO::resampled_theta(std::size_t group, Rng& rng) const {
  const RowHistory& h = history_[group];
  const auto d = static_cast<Eigen::Index>(context().dim);
  const std::size_t m = h.size();
  if (m == 0) return Vector::Zero(d);

  Vector weights = Vector::Zero(static_cast<Eigen::Index>(m));
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  for (std::size_t i = 0; i < m; ++i) weights(static_cast<Eigen::Index>(pick(rng))) += 1.0;

  const auto x = rows_of(h, context().dim);
  const Eigen::Map<const Vector> y(h.targets.data(), static_cast<Eigen::Index>(m));
  Matrix gram = x.transpose() * weights.asDiagonal() * x;
  gram.diagonal().array() += state_.grams[group].lambda();
  const Vector cross = x.transpose() * weights.cwiseProduct(y);
  return gram.llt().solve(cross);
}

Vector LinGIRO::indices(const RoundContexts& rc, std::size_t /*round*/, Rng& rng) {
  return group_indices(state_, rc, [&](std::size_t g) { return resampled_theta(g, rng); });
}

// ---------------------------------------------------------------------------
// LinUCB and reference stubs

LinUCB::LinUCB(const PolicyContext& ctx, const LinUCBParams& params)
    : Policy("LinUCB", ctx, ctx.lambda, false), params_(params) {
  if (!(params.confidence > 0.0 && params.confidence < 1.0)) {
    throw ConfigError("LinUCB: confidence must lie in (0, 1)");
  }
  if (!(params.l2 >= 0.0) || !(params.s2 >= 0.0) || !(params.context_bound > 0.0)) {
    throw ConfigError("LinUCB: l2, s2 must be >= 0 and context_bound > 0");
  }
}

Vector LinUCB::indices(const RoundContexts& rc, std::size_t round, Rng& /*rng*/) {
  const double radius = optimism::sample_optimism(
      static_cast<double>(round), context().dim, 1.0 - params_.confidence,
      params_.l2, params_.context_bound, context().lambda, params_.s2);
  Vector out = fitted_means(rc);
  for (Eigen::Index a = 0; a < out.size(); ++a) {
    const auto& g = state_.gram_for(static_cast<std::size_t>(a));
    out(a) += radius * g.vinv_norm(rc.contexts.row(a).transpose());
  }
  return out;
}

OraclePolicy::OraclePolicy(const PolicyContext& ctx)
    : Policy("Oracle", ctx, ctx.lambda, false) {}

std::size_t OraclePolicy::select_arm(const RoundContexts& rc, std::size_t /*round*/,
                                     Rng& /*rng*/) {
  return rc.best_arm;
}

Vector OraclePolicy::indices(const RoundContexts& rc, std::size_t /*round*/,
                             Rng& /*rng*/) {
  return rc.true_means;
}

UniformPolicy::UniformPolicy(const PolicyContext& ctx)
    : Policy("Uniform", ctx, ctx.lambda, false) {}

std::size_t UniformPolicy::select_arm(const RoundContexts& /*rc*/,
                                      std::size_t /*round*/, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, context().n_arms - 1);
  return pick(rng);
}

Vector UniformPolicy::indices(const RoundContexts& /*rc*/, std::size_t /*round*/,
                              Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector out(static_cast<Eigen::Index>(context().n_arms));
  for (Eigen::Index a = 0; a < out.size(); ++a) out(a) = unif(rng);
  return out;
}

}  // namespace linreboot
