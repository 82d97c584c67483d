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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "linreboot/config.hpp"
#include "linreboot/errors.hpp"
#include "linreboot/harness.hpp"

namespace linreboot {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / ("linreboot_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config(const std::string& roster) {
  return parse_config(
      "setting = stochastic\n"
      "dim = 3\n"
      "n_arms = 6\n"
      "horizon = 200\n"
      "replications = 3\n"
      "master_seed = 7\n"
      "record_every = 25\n"
      "policies = " + roster + "\n");
}

RegretCurve ramp(const std::string& policy, double slope, std::size_t n) {
  RegretCurve c;
  c.policy = policy;
  for (std::size_t t = 0; t <= n; ++t) {
    c.rounds.push_back(t);
    c.cum_regret.push_back(slope * static_cast<double>(t));
  }
  return c;
}

TEST(Config, ParsesKeysCommentsAndParams) {
  const auto c = parse_config(
      "# comment\n"
      "setting = contextual   # trailing\n"
      "dim = 10\n"
      "\n"
      "policies = LinReBoot, LinUCB\n"
      "policies.LinReBoot.sigma_omega = 0.25\n");
  EXPECT_EQ(c.setting, Setting::kContextual);
  EXPECT_EQ(c.dim, 10u);
  EXPECT_EQ(c.arms(), default_n_arms(Setting::kContextual));
  ASSERT_EQ(c.policies.size(), 2u);
  EXPECT_EQ(c.policies[0].params.at("sigma_omega"), "0.25");
  EXPECT_EQ(c.horizon, 10000u);
  EXPECT_DOUBLE_EQ(c.lambda, 0.1);
}

TEST(Config, SerializeRoundTrips) {
  const auto c = small_config("LinReBoot, LinPHE");
  const auto again = parse_config(serialize_config(c));
  EXPECT_EQ(serialize_config(again), serialize_config(c));
}

TEST(Config, ErrorsNameTheProblem) {
  auto message = [](const std::string& text) {
    try {
      parse_config(text).validate();
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("dim = 3\n").find("roster is missing"), std::string::npos);
  EXPECT_NE(message("policies = LinReBoot\nfoo = 1\n").find("unknown key"), std::string::npos);
  EXPECT_NE(message("policies = LinReBoot\ndim 3\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("policies = Bogus\n").find("unknown policy"), std::string::npos);
  EXPECT_NE(message("policies = LinReBoot\npolicies.LinUCB.l2 = 1\n").find("not in roster"),
            std::string::npos);
  EXPECT_NE(message("policies = LinReBoot\npolicies.LinReBoot.bogus = 1\n").find("bogus"),
            std::string::npos);
  EXPECT_NE(message("policies = LinReBoot\npolicies.LinReBoot.sigma_omega = -1\n")
                .find("policies.LinReBoot"),
            std::string::npos);
  EXPECT_NE(message("policies = LinReBoot\nn_arms = 5\nhorizon = 5\n").find("horizon"),
            std::string::npos);
  EXPECT_NE(message("policies = LinReBoot, LinReBoot\n").find("twice"), std::string::npos);
  EXPECT_NE(message("policies = LinReBoot\ndim = x\n").find("dim"), std::string::npos);
  EXPECT_NE(message("policies = LinGIRO\npolicies.LinGIRO.a = 1.5\n").find("integer"),
            std::string::npos);
}

TEST(Config, LoadPrefixesPath) {
  try {
    load_config("/nonexistent/x.conf");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/x.conf"), std::string::npos);
  }
}

TEST(Config, ShippedConfigsValidate) {
  for (const auto& entry : fs::directory_iterator(LINREBOOT_CONFIG_DIR)) {
    if (entry.path().extension() != ".conf") continue;
    EXPECT_NO_THROW(load_config(entry.path().string()).validate()) << entry.path();
  }
}

TEST(Harness, ReplicationSeedsDiffer) {
  EXPECT_NE(replication_seed(1, 0), replication_seed(1, 1));
  EXPECT_NE(replication_seed(1, 0), replication_seed(2, 0));
  EXPECT_EQ(replication_seed(5, 3), replication_seed(5, 3));
}

TEST(Harness, RecordsGridAndFinalRound) {
  auto c = small_config("LinReBoot");
  c.horizon = 210;
  const auto curves = run_experiment(c);
  ASSERT_EQ(curves.size(), 3u);
  const auto& r = curves[0].rounds;
  EXPECT_EQ(r.front(), 25u);
  EXPECT_EQ(r.back(), 210u);
  EXPECT_EQ(r[r.size() - 2], 200u);
  for (std::size_t i = 1; i < curves[0].cum_regret.size(); ++i) {
    EXPECT_GE(curves[0].cum_regret[i], curves[0].cum_regret[i - 1]);
  }
}

TEST(Harness, OracleHasZeroRegret) {
  for (const auto s : {"stochastic", "contextual", "covariates"}) {
    auto c = small_config("Oracle");
    set_config_value(c, "setting", s);
    for (const auto& curve : run_experiment(c)) {
      for (const double v : curve.cum_regret) EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(Harness, UniformRegretMatchesMeanGap) {
  auto c = small_config("Uniform");
  c.horizon = 20000;
  c.replications = 1;
  const auto curves = run_experiment(c);
  const auto env = generate_env(c.setting, c.dim, c.arms(), replication_seed(c.master_seed, 0));
  const auto rc = round_contexts(env, 1, EnvStream(replication_seed(c.master_seed, 0)));
  const double mean_gap = rc.true_means.maxCoeff() - rc.true_means.mean();
  const double expected = mean_gap * static_cast<double>(c.horizon);
  EXPECT_NEAR(curves[0].cum_regret.back(), expected, 0.1 * expected);
}

TEST(Harness, ThreadCountDoesNotChangeCurves) {
  auto c = small_config("LinReBoot, LinTS-G, LinPHE");
  c.threads = 1;
  const auto a = run_experiment(c);
  c.threads = 4;
  const auto b = run_experiment(c);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].policy, b[i].policy);
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].cum_regret, b[i].cum_regret);
  }
}

TEST(Harness, PoliciesShareEnvironmentPerReplication) {
  const auto curves = run_experiment(small_config("LinReBoot, LinUCB"));
  ASSERT_EQ(curves.size(), 6u);
  EXPECT_EQ(curves[0].policy, "LinReBoot");
  EXPECT_EQ(curves[1].policy, "LinUCB");
  EXPECT_EQ(curves[0].seed, curves[1].seed);
  EXPECT_NE(curves[0].seed, curves[2].seed);
}

TEST(Aggregate, RampExample) {
  const std::size_t n = 10;
  const auto agg = aggregate({ramp("P", 1.0, n), ramp("P", 2.0, n)});
  ASSERT_EQ(agg.size(), 1u);
  EXPECT_EQ(agg[0].reps, 2u);
  for (std::size_t t = 0; t <= n; ++t) {
    const double gap = static_cast<double>(t);
    EXPECT_DOUBLE_EQ(agg[0].mean[t], 1.5 * gap);
    EXPECT_NEAR(agg[0].stderr_[t], 0.5 * gap / std::sqrt(2.0), 1e-12);
  }
}

TEST(Aggregate, SingleReplicationHasZeroStderr) {
  const auto agg = aggregate({ramp("P", 3.0, 4)});
  for (const double s : agg[0].stderr_) EXPECT_EQ(s, 0.0);
}

TEST(Aggregate, KeepsRosterOrderAndRejectsMismatch) {
  const auto agg = aggregate({ramp("B", 1.0, 3), ramp("A", 1.0, 3), ramp("B", 1.0, 3)});
  ASSERT_EQ(agg.size(), 2u);
  EXPECT_EQ(agg[0].policy, "B");
  EXPECT_EQ(agg[0].reps, 2u);
  EXPECT_THROW(aggregate({ramp("P", 1.0, 3), ramp("P", 1.0, 4)}), RuntimeError);
}

TEST(Persistence, CsvRoundTripIsExact) {
  const auto dir = scratch("roundtrip");
  const auto result = run_and_aggregate(small_config("LinReBoot, LinUCB"));
  write_results(result, dir.string());
  for (const auto* suffix : {"_curves.csv", "_agg.csv", "_timing.csv"}) {
    EXPECT_TRUE(fs::exists(dir / ("stochastic_3" + std::string(suffix))));
  }
  const auto back = read_results(dir.string(), Setting::kStochastic, 3);
  ASSERT_EQ(back.curves.size(), result.curves.size());
  for (std::size_t i = 0; i < back.curves.size(); ++i) {
    EXPECT_EQ(back.curves[i].policy, result.curves[i].policy);
    EXPECT_EQ(back.curves[i].seed, result.curves[i].seed);
    EXPECT_EQ(back.curves[i].rounds, result.curves[i].rounds);
    EXPECT_EQ(back.curves[i].cum_regret, result.curves[i].cum_regret);
    EXPECT_EQ(back.curves[i].seconds, result.curves[i].seconds);
  }
  ASSERT_EQ(back.aggregates.size(), 2u);
  EXPECT_EQ(back.aggregates[1].mean, result.aggregates[1].mean);
}

TEST(Persistence, HeadersAndPrecision) {
  const auto dir = scratch("headers");
  RunResult r;
  r.setting = Setting::kCovariates;
  r.dim = 2;
  RegretCurve c = ramp("P", 0.1, 1);
  c.seed = 42;
  r.curves = {c};
  r.aggregates = aggregate(r.curves);
  write_results(r, dir.string());
  const std::string curves = slurp(dir / "covariates_2_curves.csv");
  EXPECT_EQ(curves,
            "setting,policy,d,seed,round,cum_regret\n"
            "covariates,P,2,42,0,0\n"
            "covariates,P,2,42,1,0.10000000000000001\n");
  const std::string agg = slurp(dir / "covariates_2_agg.csv");
  EXPECT_EQ(agg.substr(0, agg.find('\n')), "setting,policy,d,round,mean,stderr,reps");
  const std::string timing = slurp(dir / "covariates_2_timing.csv");
  EXPECT_EQ(timing.substr(0, timing.find('\n')), "setting,policy,d,seed,seconds");
}

TEST(Persistence, EmptyResultWritesHeadersOnly) {
  const auto dir = scratch("empty");
  RunResult r;
  r.dim = 4;
  write_results(r, dir.string());
  EXPECT_EQ(slurp(dir / "stochastic_4_curves.csv"), "setting,policy,d,seed,round,cum_regret\n");
  EXPECT_EQ(slurp(dir / "stochastic_4_agg.csv"), "setting,policy,d,round,mean,stderr,reps\n");
  EXPECT_EQ(slurp(dir / "stochastic_4_timing.csv"), "setting,policy,d,seed,seconds\n");
}

TEST(Persistence, ReadRejectsCorruptFiles) {
  const auto dir = scratch("corrupt");
  fs::create_directories(dir);
  std::ofstream(dir / "stochastic_3_curves.csv") << "wrong,header\n";
  EXPECT_THROW(read_results(dir.string(), Setting::kStochastic, 3), RuntimeError);
  EXPECT_THROW(read_results((dir / "missing").string(), Setting::kStochastic, 3), RuntimeError);
}

TEST(Tune, SingleValueMatchesPlainRun) {
  const auto dir = scratch("tune");
  auto c = small_config("LinReBoot, LinUCB");
  const auto points = tune_sigma_omega(c, {0.4});
  ASSERT_EQ(points.size(), 1u);
  ExperimentConfig solo = c;
  solo.policies = {PolicySpec{"LinReBoot", {{"sigma_omega", "0.4"}}}};
  const auto direct = run_and_aggregate(solo);
  EXPECT_EQ(points[0].result.aggregates.at(0).mean, direct.aggregates.at(0).mean);
  EXPECT_DOUBLE_EQ(points[0].final_mean, direct.aggregates[0].mean.back());
  write_tuning(points, dir.string());
  const std::string summary = slurp(dir / "tune_summary.csv");
  EXPECT_EQ(summary.substr(0, summary.find('\n')),
            "setting,d,sigma_omega,final_mean,final_stderr,reps");
  EXPECT_TRUE(fs::exists(dir / "sigma_0.4" / "stochastic_3_agg.csv"));
  EXPECT_THROW(tune_sigma_omega(c, {}), ConfigError);
  EXPECT_THROW(tune_sigma_omega(c, {0.1, 0.0}), ConfigError);
}

TEST(Export, RebuildsAggregates) {
  const auto dir = scratch("export");
  const auto result = run_and_aggregate(small_config("LinReBoot, Uniform"));
  write_results(result, dir.string());
  const std::string agg = slurp(dir / "stochastic_3_agg.csv");
  fs::remove(dir / "stochastic_3_agg.csv");
  const std::string summary = export_results(dir.string());
  EXPECT_EQ(slurp(dir / "stochastic_3_agg.csv"), agg);
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "setting,policy,d,round,mean,stderr,reps");
  EXPECT_NE(summary.find("stochastic,LinReBoot,3,200,"), std::string::npos);
  EXPECT_NE(summary.find("stochastic,Uniform,3,200,"), std::string::npos);
  EXPECT_THROW(export_results(scratch("export_empty").string()), RuntimeError);
}

TEST(ParallelFor, CoversEveryIndexAndRethrows) {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hits[i] += 1; });
  for (const int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw RuntimeError("boom");
                            }),
               RuntimeError);
}

}  // namespace
}  // namespace linreboot
