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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes or is listed with --known-red,
// 1 otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "linreboot/config.hpp"
#include "linreboot/environment.hpp"
#include "linreboot/harness.hpp"
#include "linreboot/linalg.hpp"
#include "linreboot/optimism.hpp"
#include "linreboot/policy.hpp"
#include "linreboot/verifier.hpp"

namespace {

namespace fs = std::filesystem;
using linreboot::linalg::Matrix;
using linreboot::linalg::Vector;

struct Options {
  std::string cli;
  std::string work;
  std::string configs;
  std::size_t threads = 1;
  std::size_t timing_reps = 2;
  std::vector<int> only;
  std::vector<int> known_red;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 6) {
  std::ostringstream out;
  out.precision(digits);
  out << v;
  return out.str();
}

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// 1. Ridge fit against dense normal equations.
Outcome ridge_oracle(const Options&) {
  Clock clock;
  std::mt19937_64 rng(101);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> rows_dist(1, 1000);
  const int dims[] = {1, 5, 10, 20};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int d = dims[i % 4];
    const int rows = rows_dist(rng);
    Matrix x(rows, d);
    Vector y(rows);
    for (Eigen::Index j = 0; j < x.size(); ++j) x.data()[j] = g(rng);
    for (auto& v : y) v = g(rng);
    linreboot::linalg::GramState state(static_cast<std::size_t>(d), 0.1);
    for (int r = 0; r < rows; ++r) state.update(x.row(r).transpose(), y(r));
    Matrix a = x.transpose() * x;
    a.diagonal().array() += 0.1;
    const Vector oracle = a.fullPivLu().solve(x.transpose() * y);
    worst = std::max(worst, (state.ridge_fit() - oracle).norm() / oracle.norm());
  }
  const double t = clock.seconds();
  return {worst <= 1e-8 && t < 5.0,
          "max relative error " + num(worst) + " (<= 1e-8), " + num(t, 3) + " s (< 5 s)"};
}

// 2. Incremental RSS against direct recomputation at every round.
Outcome rss_identity(const Options&) {
  using namespace linreboot;
  const EnvSpec env = generate_env(Setting::kStochastic, 5, 100, 2);
  const EnvStream stream(3);
  PolicyContext ctx;
  ctx.setting = Setting::kStochastic;
  ctx.dim = 5;
  ctx.n_arms = 100;
  LinReBoot policy(ctx, 0.3, SamplerPath::kNaive);
  Rng rng(4);
  double worst = 0.0;
  std::size_t checks = 0;
  for (std::size_t t = 1; t <= 1000; ++t) {
    const RoundContexts rc = round_contexts(env, t, stream);
    const Vector mu = policy.fitted_means(rc);
    for (std::size_t k = 0; k < ctx.n_arms; ++k) {
      const ArmStats& st = policy.state().arms[k];
      if (st.count == 0) continue;
      const double m = mu(static_cast<Eigen::Index>(k));
      double direct = 0.0;
      for (const double r : policy.state().reward_logs[k]) direct += (r - m) * (r - m);
      const double inc = incremental_rss(st.reward_sum, st.reward_sq_sum, st.count, m);
      worst = std::max(worst, std::abs(inc - direct) / direct);
      ++checks;
    }
    const std::size_t arm = policy.select_arm(rc, t, rng);
    policy.observe(arm, rc.contexts.row(static_cast<Eigen::Index>(arm)).transpose(),
                   pull(env, rc, arm, stream).reward);
  }
  return {worst <= 1e-9, "max relative error " + num(worst) + " over " +
                             std::to_string(checks) + " arm-rounds (<= 1e-9)"};
}

// 3. Naive and efficient sampler moments against the closed form.
Outcome sampler_equivalence(const Options&) {
  using namespace linreboot;
  const int n = 100000;
  int failures = 0;
  double worst = 0.0;  // largest deviation in standard errors
  for (int h = 0; h < 10; ++h) {
    const double sigma = 0.3 + 0.1 * h;
    const auto history = verify::freeze_history(Setting::kStochastic, 5, 10,
                                                100 + 40 * static_cast<std::size_t>(h),
                                                sigma, 300 + static_cast<std::uint64_t>(h));
    const std::size_t arm = history.contexts.best_arm;
    const auto& a = history.arms[arm];
    const double var = sigma * sigma * a.rss / (static_cast<double>(a.s) * a.s);
    for (const auto path : {SamplerPath::kNaive, SamplerPath::kEfficient}) {
      Rng rng(derive_seed(9, static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(path)));
      double sum = 0.0;
      double sq = 0.0;
      for (int i = 0; i < n; ++i) {
        const double v =
            path == SamplerPath::kNaive
                ? reboot_index_naive(history.state, arm, a.mu_hat, sigma, rng).mu_tilde
                : reboot_index_efficient(history.state, arm, a.mu_hat, sigma, rng).mu_tilde;
        sum += v;
        sq += v * v;
      }
      const double mean = sum / n;
      const double sample_var = (sq - n * mean * mean) / (n - 1);
      const double z_mean = std::abs(mean - a.mu_hat) / std::sqrt(var / n);
      const double z_var = std::abs(sample_var - var) / (var * std::sqrt(2.0 / (n - 1)));
      worst = std::max({worst, z_mean, z_var});
      if (z_mean > 3.0) ++failures;
      if (z_var > 3.0) ++failures;
    }
  }
  return {failures == 0, std::to_string(failures) + " of 40 moment checks outside 3 SE; worst " +
                             num(worst, 3) + " SE"};
}

Outcome from_report(const linreboot::verify::Report& r, const std::string& what) {
  std::size_t failed = 0;
  for (const auto& e : r.entries) failed += e.pass ? 0 : 1;
  return {r.all_pass() && !r.entries.empty(),
          what + ": " + std::to_string(r.entries.size() - failed) + "/" +
              std::to_string(r.entries.size()) + " checks pass"};
}

linreboot::verify::SuiteOptions suite_options(const Options& o) {
  linreboot::verify::SuiteOptions s;
  s.threads = o.threads;
  return s;
}

// 4. Sample-radius coverage.
Outcome lemma52(const Options& o) {
  Clock clock;
  const auto r = linreboot::verify::run_lemma52(suite_options(o));
  double min_cov = 1.0;
  for (const auto& e : r.entries) {
    if (e.metric.find(".coverage") != std::string::npos) min_cov = std::min(min_cov, e.value);
  }
  const double t = clock.seconds();
  Outcome out = from_report(r, "1000 runs, min coverage " + num(min_cov) + " (floor 0.929)");
  out.pass = out.pass && t < 600.0;
  out.detail += ", " + num(t, 3) + " s";
  return out;
}

// 5. Bootstrap-radius coverage.
Outcome lemma53(const Options& o) {
  const auto r = linreboot::verify::run_lemma53(suite_options(o));
  return from_report(r, "exact " + num(linreboot::optimism::bootstrap_coverage_exact(0.1)) +
                            ", 1e5 draws per arm within 3 SE");
}

// 6. Anti-concentration bound dominance.
Outcome lemma54(const Options& o) {
  const auto r = linreboot::verify::run_lemma54(suite_options(o));
  return from_report(r, "100 histories x 1e6 draws");
}

// 7. Corollary scaling.
Outcome corollary(const Options& o) {
  const auto r = linreboot::verify::run_bounds(suite_options(o));
  double worst = 0.0;
  for (const auto& e : r.entries) {
    if (e.metric.find("corollary") != std::string::npos) worst = std::max(worst, e.value);
  }
  Outcome out = from_report(r, "max bound(2n)/bound(n) " + num(worst) + " (<= " +
                                   num(1.25 * std::sqrt(2.0)) + ")");
  return out;
}

linreboot::ExperimentConfig load(const Options& o, const std::string& name, std::size_t reps) {
  auto c = linreboot::load_config((fs::path(o.configs) / name).string());
  c.replications = reps;
  c.threads = o.threads;
  c.validate();
  return c;
}

const linreboot::AggregateCurve& find_agg(const linreboot::RunResult& r, const std::string& p) {
  for (const auto& a : r.aggregates) {
    if (a.policy == p) return a;
  }
  throw std::runtime_error("no aggregate for " + p);
}

double value_at(const linreboot::AggregateCurve& a, std::size_t round) {
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    if (a.rounds[i] == round) return a.mean[i];
  }
  throw std::runtime_error("round " + std::to_string(round) + " not recorded");
}

// 8 and 9 share one six-policy run.
struct MainRun {
  linreboot::ExperimentConfig config;
  linreboot::RunResult result;
  bool done = false;
};

MainRun& main_run(const Options& o) {
  static MainRun run;
  if (!run.done) {
    run.config = load(o, "stochastic_d5.conf", 20);
    run.result = linreboot::run_and_aggregate(run.config);
    run.done = true;
  }
  return run;
}

Outcome sublinear(const Options& o) {
  using namespace linreboot;
  Clock clock;
  const MainRun& run = main_run(o);
  const auto& agg = find_agg(run.result, "LinReBoot");
  const double r2k = value_at(agg, 2000);
  const double r10k = value_at(agg, 10000);
  double max_gap = 0.0;
  for (std::size_t rep = 0; rep < run.config.replications; ++rep) {
    const std::uint64_t seed = replication_seed(run.config.master_seed, rep);
    const EnvSpec env = generate_env(run.config.setting, run.config.dim, run.config.arms(), seed);
    const Vector mu = round_contexts(env, 1, EnvStream(seed)).true_means;
    max_gap += mu.maxCoeff() - mu.minCoeff();
  }
  max_gap /= static_cast<double>(run.config.replications);
  const bool slope = r10k / 1e4 < 0.5 * r2k / 2e3;
  const bool level = r10k < 0.15 * 1e4 * max_gap;
  return {slope && level, "R(1e4)/1e4 = " + num(r10k / 1e4) + " vs 0.5 R(2e3)/2e3 = " +
                              num(0.5 * r2k / 2e3) + "; R(1e4) = " + num(r10k) +
                              " vs 0.15 n max gap = " + num(0.15 * 1e4 * max_gap)};
}

Outcome ordering(const Options& o) {
  const MainRun& run = main_run(o);
  const double ours = find_agg(run.result, "LinReBoot").mean.back();
  bool pass = true;
  std::string detail = "LinReBoot " + num(ours);
  for (const auto* other : {"LinUCB", "LinPHE", "LinGIRO"}) {
    const double v = find_agg(run.result, other).mean.back();
    pass = pass && ours <= v;
    detail += ", " + std::string(other) + " " + num(v);
  }
  return {pass, detail};
}

// 10. Tuning grids; seeds come from the shipped configs.
Outcome tuning(const Options& o) {
  auto best_of = [](const std::vector<linreboot::TunePoint>& pts, std::string& detail) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].final_mean < pts[best].final_mean) best = i;
      detail += (i ? ", " : "") + num(pts[i].sigma_omega) + ":" + num(pts[i].final_mean, 5);
    }
    return pts[best].sigma_omega;
  };
  std::string stoch_detail;
  const double stoch = best_of(
      linreboot::tune_sigma_omega(load(o, "stochastic_d5.conf", 20),
                                  {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 1.0}),
      stoch_detail);
  std::string ctx_detail;
  const double ctx = best_of(linreboot::tune_sigma_omega(load(o, "contextual_d5.conf", 20),
                                                         {0.05, 0.1, 0.2, 0.5, 1.0}),
                             ctx_detail);
  return {stoch == 0.3 && ctx == 0.05,
          "stochastic best " + num(stoch) + " (want 0.3) [" + stoch_detail +
              "]; contextual best " + num(ctx) + " (want 0.05) [" + ctx_detail + "]"};
}

// 11. Wall-clock ordering.
Outcome timing(const Options& o) {
  auto mean_seconds = [&](const std::string& file, const std::string& rival, double& ours,
                          double& theirs) {
    auto c = load(o, file, o.timing_reps);
    c.policies = {linreboot::PolicySpec{"LinReBoot", c.find_policy("LinReBoot")->params},
                  linreboot::PolicySpec{rival, c.find_policy(rival)->params}};
    // Sequential so the two policies do not compete for cores.
    c.threads = 1;
    ours = 0.0;
    theirs = 0.0;
    for (const auto& curve : linreboot::run_experiment(c)) {
      (curve.policy == "LinReBoot" ? ours : theirs) += curve.seconds;
    }
    ours /= static_cast<double>(c.replications);
    theirs /= static_cast<double>(c.replications);
  };
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  mean_seconds("stochastic_d20.conf", "LinGIRO", a, b);
  mean_seconds("covariates_d20.conf", "LinTS-G", c, d);
  return {a < b && c < d, "stochastic d20: LinReBoot " + num(a, 3) + " s vs LinGIRO " +
                              num(b, 3) + " s; covariates d20: LinReBoot " + num(c, 3) +
                              " s vs LinTS-G " + num(d, 3) + " s"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Timing rows without the seconds column.
std::string timing_keys(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  std::string out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
  return out;
}

// 12. Two CLI runs, one and four threads.
Outcome determinism(const Options& o) {
  const fs::path dir = fs::path(o.work) / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto cfg = linreboot::load_config((fs::path(o.configs) / "covariates_d5.conf").string());
  cfg.horizon = 2000;
  cfg.replications = 4;
  const fs::path conf = dir / "run.conf";
  std::ofstream(conf) << linreboot::serialize_config(cfg);
  for (const char* threads : {"1", "4"}) {
    const std::string cmd = "'" + o.cli + "' run --config '" + conf.string() + "' --out '" +
                            (dir / threads).string() + "' --threads " + threads +
                            " --seed 11 > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
  }
  const std::string stem = "covariates_5";
  const bool curves = slurp(dir / "1" / (stem + "_curves.csv")) ==
                      slurp(dir / "4" / (stem + "_curves.csv"));
  const bool agg =
      slurp(dir / "1" / (stem + "_agg.csv")) == slurp(dir / "4" / (stem + "_agg.csv"));
  const bool keys = timing_keys(dir / "1" / (stem + "_timing.csv")) ==
                    timing_keys(dir / "4" / (stem + "_timing.csv"));
  const bool nonempty = slurp(dir / "1" / (stem + "_curves.csv")).size() > 1000;
  return {curves && agg && keys && nonempty,
          std::string("curves ") + (curves ? "identical" : "differ") + ", agg " +
              (agg ? "identical" : "differ") + ", timing keys " + (keys ? "identical" : "differ") +
              " (seconds column is wall-clock)"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome(const Options&)> check;
};

}  // namespace

int main(int argc, char** argv) {
  Options o;
  o.threads = std::max(1u, std::thread::hardware_concurrency());
  CLI::App app{"LinReBoot acceptance checks"};
  app.add_option("--cli", o.cli, "Path to the linreboot executable")->required();
  app.add_option("--work", o.work, "Scratch directory")->required();
  app.add_option("--configs", o.configs, "Directory of shipped configs")->required();
  app.add_option("--threads", o.threads, "Worker threads");
  app.add_option("--timing-reps", o.timing_reps, "Replications for the timing check");
  app.add_option("--only", o.only, "Run only these criteria")->delimiter(',');
  app.add_option("--known-red", o.known_red, "Criteria whose failure is documented")
      ->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(o.work);

  const std::vector<Criterion> criteria = {
      {1, "ridge oracle", ridge_oracle},
      {2, "rss identity", rss_identity},
      {3, "sampler equivalence", sampler_equivalence},
      {4, "sample radius coverage", lemma52},
      {5, "bootstrap radius coverage", lemma53},
      {6, "anti-concentration dominance", lemma54},
      {7, "bound scaling", corollary},
      {8, "sublinear regret", sublinear},
      {9, "policy ordering", ordering},
      {10, "tuning reproduction", tuning},
      {11, "timing ordering", timing},
      {12, "determinism", determinism},
  };

  const std::set<int> only(o.only.begin(), o.only.end());
  const std::set<int> known(o.known_red.begin(), o.known_red.end());
  std::ofstream report(fs::path(o.work) / "acceptance_report.txt");
  int unexpected = 0;
  int passed = 0;
  int ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Clock clock;
    Outcome out;
    try {
      out = c.check(o);
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    ++ran;
    if (out.pass) ++passed;
    if (!out.pass && !known.count(c.id)) ++unexpected;
    std::ostringstream line;
    line << (out.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << out.detail
         << " [" << num(clock.seconds(), 3) << " s]"
         << (!out.pass && known.count(c.id) ? " (known red)" : "");
    std::cout << line.str() << std::endl;
    report << line.str() << '\n';
  }
  std::cout << "acceptance: " << passed << "/" << ran << " criteria pass" << std::endl;
  report << "acceptance: " << passed << "/" << ran << " criteria pass\n";
  return unexpected == 0 ? 0 : 1;
}
