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

#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "linreboot/errors.hpp"
#include "linreboot/optimism.hpp"
#include "linreboot/verifier.hpp"

namespace linreboot::verify {
namespace {

TEST(FreezeHistory, SnapshotsAgreeWithState) {
  const auto h = freeze_history(Setting::kStochastic, 5, 10, 200, 0.5, 3);
  EXPECT_EQ(h.round, 201u);
  ASSERT_EQ(h.arms.size(), 10u);
  std::size_t total = 0;
  for (std::size_t k = 0; k < 10; ++k) {
    const auto& a = h.arms[k];
    EXPECT_GE(a.s, 1u);
    EXPECT_EQ(a.s, h.state.arms[k].count);
    EXPECT_GT(a.norm, 0.0);
    double rss = 0.0;
    for (const double r : h.state.reward_logs[k]) rss += (r - a.mu_hat) * (r - a.mu_hat);
    EXPECT_NEAR(a.rss, rss, 1e-9 * std::max(1.0, rss));
    total += a.s;
  }
  EXPECT_EQ(total, 200u);
}

TEST(FreezeHistory, Deterministic) {
  const auto a = freeze_history(Setting::kContextual, 3, 4, 50, 0.3, 9);
  const auto b = freeze_history(Setting::kContextual, 3, 4, 50, 0.3, 9);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(a.arms[k].mu_hat, b.arms[k].mu_hat);
}

TEST(Lemma52, CoverageAboveFloor) {
  Lemma52Config cfg;
  cfg.trials = 200;
  cfg.round = 100;
  cfg.seed = 5;
  const auto cov = mc_coverage_lemma52(cfg);
  ASSERT_EQ(cov.size(), 10u);
  for (const double c : cov) EXPECT_GE(c, 1.0 - cfg.alpha - 3.0 * std::sqrt(cfg.alpha / 200.0));
}

TEST(Lemma52, ZeroNoiseGivesFullCoverage) {
  Lemma52Config cfg;
  cfg.trials = 50;
  cfg.round = 60;
  cfg.noise_variance = 0.0;
  cfg.l2 = 0.1;
  for (const double c : mc_coverage_lemma52(cfg)) EXPECT_EQ(c, 1.0);
}

TEST(Lemma53, CoverageNearExactValue) {
  const auto h = freeze_history(Setting::kStochastic, 5, 10, 200, 0.5, 11);
  const std::size_t trials = 20000;
  const double exact = optimism::bootstrap_coverage_exact(0.1);
  const double tol = 4.0 * std::sqrt(exact * (1.0 - exact) / trials);
  for (const double c : mc_coverage_lemma53(h, 0.5, 0.1, trials, 2)) {
    EXPECT_NEAR(c, exact, tol);
  }
}

TEST(Lemma54, EmpiricalTailDominatesBound) {
  const auto h = freeze_history(Setting::kStochastic, 5, 10, 300, 8.0, 4);
  const auto& a = h.arms[0];
  for (const double c1_val : {0.01, 0.05, 0.2}) {
    const double u = optimism::standardized_threshold(c1_val, a.s, a.norm, a.rss, 8.0);
    const double exact = optimism::gaussian_upper_tail(u);
    const double emp = mc_anti_concentration(h, 0, c1_val, 8.0, 200000, 6);
    EXPECT_NEAR(emp, exact, 4.0 * std::sqrt(exact * (1.0 - exact) / 200000) + 1e-12);
    EXPECT_GE(emp, optimism::anti_concentration_lower_bound(c1_val, a.s, a.norm, a.rss, 8.0, 1.0) -
                       4.0 * std::sqrt(exact * (1.0 - exact) / 200000));
  }
}

TEST(Bounds, CorollaryRatioStaysBounded) {
  const auto setup = bound_setup(5, 10, 2.0, 1);
  EXPECT_FALSE(setup.degenerate);
  EXPECT_GT(setup.params.s1, 0.0);
  const double base = corollary_bound(setup, 1u << 10);
  EXPECT_GT(base, 0.0);
  for (int e = 11; e <= 15; ++e) {
    const double n = static_cast<double>(1u << e);
    const double ratio = corollary_bound(setup, 1u << e) / (5.0 * std::sqrt(n) * std::log(n) * std::log(n));
    const double ratio0 = base / (5.0 * std::sqrt(1024.0) * std::log(1024.0) * std::log(1024.0));
    EXPECT_LE(ratio, 1.25 * std::sqrt(2.0) * ratio0);
  }
}

TEST(Report, RelationsAndFormatting) {
  Report r;
  r.suite = "demo";
  r.info = {{"seed", "1"}};
  r.add("demo.a", 1.0, ">=", 1.0);
  r.add("demo.b", 1.0, "<", 1.0);
  r.add_within("demo.c", 0.5, 0.52, 0.05);
  EXPECT_THROW(r.add("demo.d", 1.0, "==", 1.0), ConfigError);
  EXPECT_FALSE(r.all_pass());
  const std::string text = format_report(r);
  EXPECT_EQ(text.substr(0, 13), "suite = demo\n");
  EXPECT_NE(text.find("demo.info.seed = 1\n"), std::string::npos);
  EXPECT_NE(text.find("demo.a.status = pass\n"), std::string::npos);
  EXPECT_NE(text.find("demo.b.status = fail\n"), std::string::npos);
  EXPECT_NE(text.find("demo.c.status = pass\n"), std::string::npos);
  EXPECT_NE(text.find("demo.summary.failed = 1\n"), std::string::npos);
  EXPECT_NE(text.find("demo.summary.status = fail\n"), std::string::npos);
}

TEST(Suites, SmallRunsPass) {
  SuiteOptions o;
  o.lemma52_trials = 1000;
  o.lemma53_draws = 20000;
  o.lemma54_histories = 5;
  o.lemma54_draws = 20000;
  o.threads = 4;
  for (const auto& r : run_suite("all", o)) {
    EXPECT_TRUE(r.all_pass()) << format_report(r);
  }
  EXPECT_THROW(run_suite("lemma99", o), ConfigError);
}

}  // namespace
}  // namespace linreboot::verify
