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

// linreboot: run, tune, verify and export bandit experiments.
//
// Exit status: 0 success, 1 configuration or usage error, 2 runtime error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "linreboot/linreboot.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int exit_code(lrb_status status) {
  switch (status) {
    case LRB_OK:
      return kExitOk;
    case LRB_ERR_RUNTIME:
      return kExitRuntime;
    default:
      return kExitConfig;
  }
}

int report(lrb_status status) {
  if (status != LRB_OK) std::cerr << "linreboot: " << lrb_last_error() << '\n';
  return exit_code(status);
}

struct ConfigHandle {
  lrb_config* ptr = nullptr;
  ~ConfigHandle() { lrb_config_free(ptr); }
};

lrb_status load(const std::string& path, std::optional<std::uint64_t> reps,
                std::optional<std::uint64_t> seed, std::optional<std::uint64_t> threads,
                ConfigHandle& config) {
  lrb_status st = lrb_config_load(path.c_str(), &config.ptr);
  if (st != LRB_OK) return st;
  if (reps) st = lrb_config_set(config.ptr, "replications", std::to_string(*reps).c_str());
  if (st == LRB_OK && seed) {
    st = lrb_config_set(config.ptr, "master_seed", std::to_string(*seed).c_str());
  }
  if (st == LRB_OK && threads) {
    st = lrb_config_set(config.ptr, "threads", std::to_string(*threads).c_str());
  }
  if (st == LRB_OK) st = lrb_config_validate(config.ptr);
  return st;
}

int cmd_run(const std::string& config_path, const std::string& out,
            std::optional<std::uint64_t> reps, std::optional<std::uint64_t> seed,
            std::optional<std::uint64_t> threads) {
  ConfigHandle config;
  if (const auto st = load(config_path, reps, seed, threads, config); st != LRB_OK) {
    return report(st);
  }
  lrb_results* results = nullptr;
  lrb_status st = lrb_run(config.ptr, &results);
  if (st == LRB_OK) st = lrb_results_write(results, out.c_str());
  if (st == LRB_OK) {
    std::cout << "wrote " << lrb_results_num_curves(results) << " curves to " << out << '\n';
  }
  lrb_results_free(results);
  return report(st);
}

int cmd_tune(const std::string& config_path, const std::vector<double>& grid,
             const std::string& out, std::optional<std::uint64_t> reps,
             std::optional<std::uint64_t> seed, std::optional<std::uint64_t> threads) {
  ConfigHandle config;
  if (const auto st = load(config_path, reps, seed, threads, config); st != LRB_OK) {
    return report(st);
  }
  std::size_t best = 0;
  const lrb_status st = lrb_tune(config.ptr, grid.data(), grid.size(), out.c_str(), &best);
  if (st == LRB_OK) {
    std::cout << "best sigma_omega = " << grid[best] << " (summary in " << out
              << "/tune_summary.csv)\n";
  }
  return report(st);
}

int cmd_verify(const std::string& suite, const std::string& out, std::uint64_t seed,
               std::uint64_t threads) {
  int all_pass = 0;
  const lrb_status st = lrb_verify(suite.c_str(), out.c_str(), seed, threads, &all_pass);
  if (st == LRB_OK) {
    std::cout << "verify " << suite << ": " << (all_pass ? "pass" : "fail")
              << " (reports in " << out << ")\n";
  }
  return report(st);
}

int cmd_export(const std::string& in) {
  char* csv = nullptr;
  const lrb_status st = lrb_export(in.c_str(), &csv);
  if (st == LRB_OK) std::cout << csv;
  lrb_string_free(csv);
  return report(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LinReBoot linear bandit simulation and verification toolkit"};
  app.set_version_flag("--version", std::string(lrb_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> threads;

  auto* run = app.add_subcommand("run", "Run replicated experiments");
  run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--reps", reps, "Override replications");
  run->add_option("--seed", seed, "Override master_seed");
  run->add_option("--threads", threads, "Override worker threads");

  std::vector<double> grid;
  auto* tune = app.add_subcommand("tune", "Sweep LinReBoot sigma_omega");
  tune->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  tune->add_option("--grid", grid, "Comma-separated sigma_omega values")
      ->required()
      ->delimiter(',');
  tune->add_option("--out", out_dir, "Output directory")->required();
  tune->add_option("--reps", reps, "Override replications");
  tune->add_option("--seed", seed, "Override master_seed");
  tune->add_option("--threads", threads, "Override worker threads");

  std::string suite;
  std::uint64_t verify_seed = 20240601;
  std::uint64_t verify_threads = 1;
  auto* verify = app.add_subcommand("verify", "Run theory verification suites");
  verify->add_option("--suite", suite, "Suite to run")
      ->required()
      ->check(CLI::IsMember({"lemma52", "lemma53", "lemma54", "bounds", "all"}));
  verify->add_option("--out", out_dir, "Report directory")->required();
  verify->add_option("--seed", verify_seed, "Monte Carlo seed");
  verify->add_option("--threads", verify_threads, "Worker threads");

  std::string in_dir;
  std::string format = "csv";
  auto* exp = app.add_subcommand("export", "Rebuild aggregates and print a summary");
  exp->add_option("--in", in_dir, "Results directory")->required();
  exp->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (run->parsed()) return cmd_run(config_path, out_dir, reps, seed, threads);
  if (tune->parsed()) return cmd_tune(config_path, grid, out_dir, reps, seed, threads);
  if (verify->parsed()) return cmd_verify(suite, out_dir, verify_seed, verify_threads);
  return cmd_export(in_dir);
}
