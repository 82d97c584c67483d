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

#include "linreboot/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "linreboot/errors.hpp"
#include "linreboot/harness.hpp"

namespace linreboot::verify {

FrozenHistory freeze_history(Setting setting, std::size_t dim, std::size_t n_arms,
                             std::size_t rounds, double sigma_omega,
                             std::uint64_t seed, double lambda,
                             std::optional<double> noise_variance) {
  if (rounds < n_arms) {
    throw ConfigError("freeze_history: need at least n_arms rounds");
  }
  FrozenHistory h;
  h.env = generate_env(setting, dim, n_arms, seed);
  if (noise_variance) h.env.noise_variance = *noise_variance;

  PolicyContext ctx;
  ctx.setting = setting;
  ctx.dim = dim;
  ctx.n_arms = n_arms;
  ctx.lambda = lambda;
  LinReBoot policy(ctx, sigma_omega, SamplerPath::kNaive);
  const EnvStream stream(seed);
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(StreamTag::kPolicy)));
  for (std::size_t t = 1; t <= rounds; ++t) {
    const RoundContexts rc = round_contexts(h.env, t, stream);
    const std::size_t arm = policy.select_arm(rc, t, rng);
    const PullOutcome out = pull(h.env, rc, arm, stream);
    policy.observe(arm, rc.contexts.row(static_cast<Eigen::Index>(arm)).transpose(),
                   out.reward);
  }

  h.round = rounds + 1;
  h.contexts = round_contexts(h.env, h.round, stream);
  h.state = policy.state();
  const linalg::Vector mu = policy.fitted_means(h.contexts);
  for (std::size_t k = 0; k < n_arms; ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    const ArmStats& st = h.state.arms[k];
    ArmSnapshot a;
    a.s = st.count;
    a.mu_hat = mu(row);
    a.true_mean = h.contexts.true_means(row);
    a.rss = incremental_rss(st.reward_sum, st.reward_sq_sum, st.count, a.mu_hat);
    a.norm = h.state.gram_for(k).vinv_norm(h.contexts.contexts.row(row).transpose());
    h.arms.push_back(a);
  }
  return h;
}

std::vector<double> mc_coverage_lemma52(const Lemma52Config& config) {
  if (config.round <= config.n_arms) {
    throw ConfigError("lemma52: round must exceed n_arms");
  }
  if (config.trials == 0) throw ConfigError("lemma52: trials must be positive");
  const double noise = config.noise_variance.value_or(default_noise_variance(config.setting));
  const double l2 = config.l2.value_or(std::sqrt(noise));
  const double radius = optimism::sample_optimism(
      static_cast<double>(config.round), config.dim, config.alpha, l2,
      config.context_bound, config.lambda, config.s2);

  std::vector<std::vector<char>> hits(config.trials);
  parallel_for(config.trials, config.threads, [&](std::size_t i) {
    const FrozenHistory h = freeze_history(
        config.setting, config.dim, config.n_arms, config.round - 1, config.sigma_omega,
        derive_seed(config.seed, static_cast<std::uint64_t>(i)), config.lambda, noise);
    hits[i].resize(config.n_arms);
    for (std::size_t k = 0; k < config.n_arms; ++k) {
      const ArmSnapshot& a = h.arms[k];
      hits[i][k] = std::abs(a.mu_hat - a.true_mean) <= radius * a.norm;
    }
  });

  std::vector<double> coverage(config.n_arms, 0.0);
  for (const auto& row : hits) {
    for (std::size_t k = 0; k < config.n_arms; ++k) coverage[k] += row[k];
  }
  for (double& c : coverage) c /= static_cast<double>(config.trials);
  return coverage;
}

std::vector<double> mc_coverage_lemma53(const FrozenHistory& history,
                                        double sigma_omega, double beta,
                                        std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw ConfigError("lemma53: trials must be positive");
  optimism::OptimismParams params;
  params.dim = history.env.dim;
  params.sigma_omega = sigma_omega;
  params = optimism::with_uniform_budgets(params, history.arms.size(), 0.5, beta);

  Rng rng(seed);
  std::vector<double> coverage;
  for (std::size_t k = 0; k < history.arms.size(); ++k) {
    const ArmSnapshot& a = history.arms[k];
    const double radius =
        optimism::c2(history.round, k, a.rss, a.s, a.norm, params) * a.norm;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < trials; ++i) {
      const BootstrapIndex idx =
          reboot_index_efficient(history.state, k, a.mu_hat, sigma_omega, rng);
      if (std::abs(idx.mu_tilde - idx.mu_hat) <= radius) ++hits;
    }
    coverage.push_back(static_cast<double>(hits) / static_cast<double>(trials));
  }
  return coverage;
}

double mc_anti_concentration(const FrozenHistory& history, std::size_t arm,
                             double c1_val, double sigma_omega,
                             std::size_t draws, std::uint64_t seed) {
  if (draws == 0) throw ConfigError("lemma54: draws must be positive");
  const ArmSnapshot& a = history.arms.at(arm);
  const double threshold = c1_val * a.norm;
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    const BootstrapIndex idx =
        reboot_index_efficient(history.state, arm, a.mu_hat, sigma_omega, rng);
    if (idx.mu_tilde - idx.mu_hat > threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

BoundSetup bound_setup(std::size_t dim, std::size_t n_arms, double b,
                       std::uint64_t seed) {
  const EnvSpec env = generate_env(Setting::kStochastic, dim, n_arms, seed);
  linalg::Matrix x = *env.fixed_contexts;
  const linalg::Vector mu = x * env.thetas.front();
  const auto best = static_cast<Eigen::Index>(argmax_lowest(mu));
  x.row(0).swap(x.row(best));

  BoundSetup out;
  const double lambda = 0.1;
  const linalg::ShrinkageGap gap = linalg::shrinkage_gap(x, env.thetas.front(), lambda);
  out.degenerate = gap.degenerate;
  out.summary = optimism::summarize_contexts(x, 0);
  auto& p = out.params;
  p.dim = dim;
  p.lambda = lambda;
  p.context_bound = 1.0;
  p.l1 = std::sqrt(env.noise_variance);
  p.l2 = std::sqrt(env.noise_variance);
  p.s1 = gap.value;
  p.s2 = 1.0;
  p.sigma_omega = default_sigma_omega(Setting::kStochastic, dim);
  p.b = b;
  p.gamma = 0.05;
  p.delta = 0.05;
  p.rho = 1.0;
  optimism::apply_spectrum(p, out.summary);
  return out;
}

double corollary_bound(const BoundSetup& setup, std::size_t n) {
  const double budget = 1.0 / std::sqrt(static_cast<double>(n));
  const auto params = optimism::with_uniform_budgets(setup.params, setup.summary.n_arms,
                                                     budget, budget);
  return optimism::regret_bound_eval(n, setup.params.dim, params, setup.summary).total;
}

// ---------------------------------------------------------------------------
// Reports

void Report::add(std::string metric, double value, std::string relation, double bound) {
  bool pass = false;
  if (relation == ">=") {
    pass = value >= bound;
  } else if (relation == "<=") {
    pass = value <= bound;
  } else if (relation == ">") {
    pass = value > bound;
  } else if (relation == "<") {
    pass = value < bound;
  } else {
    throw ConfigError("report: unknown relation '" + relation + "'");
  }
  entries.push_back(ReportEntry{std::move(metric), value, bound, std::move(relation), pass});
}

void Report::add_within(std::string metric, double value, double target,
                        double tolerance) {
  entries.push_back(ReportEntry{std::move(metric), value, target,
                                "within " + format_double(tolerance) + " of",
                                std::abs(value - target) <= tolerance});
}

bool Report::all_pass() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ReportEntry& e) { return e.pass; });
}

std::string format_report(const Report& report) {
  std::ostringstream out;
  out << "suite = " << report.suite << '\n';
  for (const auto& [k, v] : report.info) out << report.suite << ".info." << k << " = " << v << '\n';
  std::size_t failed = 0;
  for (const auto& e : report.entries) {
    out << e.metric << ".value = " << format_double(e.value) << '\n'
        << e.metric << ".bound = " << format_double(e.bound) << '\n'
        << e.metric << ".relation = " << e.relation << '\n'
        << e.metric << ".status = " << (e.pass ? "pass" : "fail") << '\n';
    if (!e.pass) ++failed;
  }
  out << report.suite << ".summary.entries = " << report.entries.size() << '\n'
      << report.suite << ".summary.failed = " << failed << '\n'
      << report.suite << ".summary.status = " << (failed == 0 ? "pass" : "fail") << '\n';
  return out.str();
}

void write_report(const Report& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeError("cannot write '" + path + "'");
  out << format_report(report);
  out.close();
  if (!out) throw RuntimeError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Suites

namespace {

std::string key(const std::string& prefix, std::size_t i, const std::string& suffix) {
  return prefix + std::to_string(i) + suffix;
}

}  // namespace

Report run_lemma52(const SuiteOptions& options) {
  Report r;
  r.suite = "lemma52";
  Lemma52Config cfg;
  cfg.trials = options.lemma52_trials;
  cfg.seed = options.seed;
  cfg.threads = options.threads;
  r.info = {{"setting", "stochastic"},
            {"dim", std::to_string(cfg.dim)},
            {"n_arms", std::to_string(cfg.n_arms)},
            {"round", std::to_string(cfg.round)},
            {"alpha_k", format_double(cfg.alpha)},
            {"trials", std::to_string(cfg.trials)},
            {"seed", std::to_string(cfg.seed)}};
  const auto coverage = mc_coverage_lemma52(cfg);
  const double floor =
      1.0 - cfg.alpha - 3.0 * std::sqrt(cfg.alpha / static_cast<double>(cfg.trials));
  for (std::size_t k = 0; k < coverage.size(); ++k) {
    r.add(key("lemma52.arm", k, ".coverage"), coverage[k], ">=", floor);
  }

  Lemma52Config quiet = cfg;
  quiet.noise_variance = 0.0;
  quiet.trials = std::min<std::size_t>(cfg.trials, 100);
  const auto exact = mc_coverage_lemma52(quiet);
  r.add("lemma52.zero_noise.min_coverage", *std::min_element(exact.begin(), exact.end()),
        ">=", 1.0);
  return r;
}

Report run_lemma53(const SuiteOptions& options) {
  Report r;
  r.suite = "lemma53";
  const double beta = 0.1;
  const double sigma_omega = 0.5;
  const std::size_t rounds = 200;
  const FrozenHistory h =
      freeze_history(Setting::kStochastic, 5, 10, rounds, sigma_omega, options.seed);
  const double exact = optimism::bootstrap_coverage_exact(beta);
  const double n = static_cast<double>(options.lemma53_draws);
  const double tol = 3.0 * std::sqrt(exact * (1.0 - exact) / n);
  r.info = {{"setting", "stochastic"},  {"dim", "5"},
            {"n_arms", "10"},           {"history_rounds", std::to_string(rounds)},
            {"beta_k", format_double(beta)}, {"sigma_omega", format_double(sigma_omega)},
            {"draws", std::to_string(options.lemma53_draws)},
            {"seed", std::to_string(options.seed)}};
  r.add("lemma53.exact_coverage", exact, ">=", 1.0 - beta);
  const auto coverage = mc_coverage_lemma53(h, sigma_omega, beta, options.lemma53_draws,
                                            derive_seed(options.seed, 53));
  for (std::size_t k = 0; k < coverage.size(); ++k) {
    r.add_within(key("lemma53.arm", k, ".coverage"), coverage[k], exact, tol);
    r.add(key("lemma53.arm", k, ".coverage_floor"), coverage[k], ">=", 1.0 - beta);
  }
  return r;
}

Report run_lemma54(const SuiteOptions& options) {
  Report r;
  r.suite = "lemma54";
  const double b = 1.0;
  const std::size_t dim = 5;
  const std::size_t n_arms = 10;
  r.info = {{"setting", "stochastic"},
            {"dim", std::to_string(dim)},
            {"n_arms", std::to_string(n_arms)},
            {"b", format_double(b)},
            {"threshold_range", "0.25..4"},
            {"histories", std::to_string(options.lemma54_histories)},
            {"draws", std::to_string(options.lemma54_draws)},
            {"seed", std::to_string(options.seed)}};

  std::vector<ReportEntry> entries(2 * options.lemma54_histories);
  parallel_for(options.lemma54_histories, options.threads, [&](std::size_t i) {
    const std::uint64_t hs = derive_seed(options.seed, 54, static_cast<std::uint64_t>(i));
    Rng prng(hs);
    const std::size_t rounds = std::uniform_int_distribution<std::size_t>(50, 500)(prng);
    const double alpha = std::exp(std::uniform_real_distribution<double>(
        std::log(0.01), std::log(0.5))(prng));
    const double u_target = std::uniform_real_distribution<double>(0.25, 4.0)(prng);

    const FrozenHistory h =
        freeze_history(Setting::kStochastic, dim, n_arms, rounds, 0.3, hs);
    const std::size_t arm = h.contexts.best_arm;
    const ArmSnapshot& a = h.arms[arm];
    const double l2 = std::sqrt(h.env.noise_variance);
    const double c1_val = optimism::sample_optimism(static_cast<double>(h.round), dim,
                                                    alpha, l2, 1.0, 0.1, 1.0);
    // Pick sigma_omega so the standardized threshold equals u_target.
    const double sigma_omega =
        c1_val * static_cast<double>(a.s) * a.norm / (u_target * std::sqrt(a.rss));
    const double bound = optimism::anti_concentration_lower_bound(c1_val, a.s, a.norm,
                                                                  a.rss, sigma_omega, b);
    const double u =
        optimism::standardized_threshold(c1_val, a.s, a.norm, a.rss, sigma_omega);
    const double exact = optimism::gaussian_upper_tail(u);
    const double mc = mc_anti_concentration(h, arm, c1_val, sigma_omega,
                                            options.lemma54_draws, derive_seed(hs, 1));
    entries[2 * i] = ReportEntry{key("lemma54.h", i, ".bound_vs_exact_tail"), bound, exact,
                                 "<=", bound <= exact};
    entries[2 * i + 1] =
        ReportEntry{key("lemma54.h", i, ".mc_tail_vs_bound"), mc, bound, ">", mc > bound};
  });
  r.entries = std::move(entries);
  return r;
}

Report run_bounds(const SuiteOptions& options) {
  Report r;
  r.suite = "bounds";
  const std::size_t dim = 5;
  const std::size_t n_arms = 10;
  const double b = 2.0;
  const BoundSetup setup = bound_setup(dim, n_arms, b, options.seed);
  r.info = {{"setting", "stochastic"},
            {"dim", std::to_string(dim)},
            {"n_arms", std::to_string(n_arms)},
            {"b", format_double(b)},
            {"rho", format_double(setup.params.rho)},
            {"s1", format_double(setup.params.s1)},
            {"sigma_min", format_double(setup.params.sigma_min)},
            {"sigma_max", format_double(setup.params.sigma_max)},
            {"seed", std::to_string(options.seed)}};

  const double limit = std::sqrt(2.0) * 1.25;
  double prev = corollary_bound(setup, std::size_t{1} << 10);
  for (int e = 10; e <= 15; ++e) {
    const double next = corollary_bound(setup, std::size_t{1} << (e + 1));
    r.add("bounds.corollary.n" + std::to_string(std::size_t{1} << e) + ".ratio",
          next / prev, "<=", limit);
    prev = next;
  }

  // Fixed budgets: the bound is nonnegative and grows with n.
  const auto fixed = optimism::with_uniform_budgets(setup.params, n_arms, 0.005, 0.005);
  double last = 0.0;
  for (const std::size_t n : {std::size_t{1000}, std::size_t{2000}, std::size_t{5000},
                              std::size_t{10000}}) {
    const auto rb = optimism::regret_bound_eval(n, dim, fixed, setup.summary);
    r.add("bounds.total.n" + std::to_string(n), rb.total, n == 1000 ? ">=" : ">", last);
    last = rb.total;
  }

  const auto rb = optimism::regret_bound_eval(10000, dim, fixed, setup.summary);
  const auto& k = rb.constants;
  const double c1_val = optimism::c1(n_arms + 1, 0, fixed);
  r.info.emplace_back("n10000.zeta1", format_double(rb.zeta1));
  r.info.emplace_back("n10000.zeta2", format_double(rb.zeta2));
  r.info.emplace_back("n10000.zeta3", format_double(rb.zeta3));
  r.info.emplace_back("n10000.zeta4", format_double(rb.zeta4));
  r.info.emplace_back("log_m1", format_double(k.log_m1));
  r.info.emplace_back("m2", format_double(k.m2));
  r.info.emplace_back("const_c1", format_double(k.c1));
  r.info.emplace_back("const_c2", format_double(k.c2));
  r.info.emplace_back("rho_condition_holds",
                      optimism::check_rho_condition(n_arms + 1, 1, c1_val, fixed, setup.summary)
                          ? "true"
                          : "false");
  r.info.emplace_back("b_condition_holds",
                      optimism::check_b_condition(1, c1_val, fixed, setup.summary) ? "true"
                                                                                  : "false");
  r.info.emplace_back("good_event_lower_bound",
                      format_double(optimism::good_event_lower_bound(1, c1_val, fixed,
                                                                     setup.summary)));
  return r;
}

std::vector<Report> run_suite(const std::string& suite, const SuiteOptions& options) {
  if (suite == "lemma52") return {run_lemma52(options)};
  if (suite == "lemma53") return {run_lemma53(options)};
  if (suite == "lemma54") return {run_lemma54(options)};
  if (suite == "bounds") return {run_bounds(options)};
  if (suite == "all") {
    return {run_lemma52(options), run_lemma53(options), run_lemma54(options),
            run_bounds(options)};
  }
  throw ConfigError("unknown suite '" + suite +
                    "' (expected lemma52, lemma53, lemma54, bounds or all)");
}

}  // namespace linreboot::verify
