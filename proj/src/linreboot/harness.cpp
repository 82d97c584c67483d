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

#include "linreboot/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "linreboot/errors.hpp"

namespace linreboot {

namespace fs = std::filesystem;

std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t rep) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(rep));
}

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::size_t error_index = n;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

RegretCurve run_policy(const ExperimentConfig& config, const PolicySpec& spec,
                       const EnvSpec& env, std::size_t rep) {
  using Clock = std::chrono::steady_clock;
  const std::uint64_t seed = replication_seed(config.master_seed, rep);
  auto policy = make_policy(spec, config);
  const EnvStream stream(seed);
  Rng rng(derive_seed(config.master_seed, static_cast<std::uint64_t>(rep),
                      fnv1a(spec.name),
                      static_cast<std::uint64_t>(StreamTag::kPolicy)));

  RegretCurve curve;
  curve.policy = spec.name;
  curve.seed = seed;
  const std::size_t points = config.horizon / config.record_every + 1;
  curve.rounds.reserve(points);
  curve.cum_regret.reserve(points);

  double total = 0.0;
  Clock::duration busy{};
  for (std::size_t t = 1; t <= config.horizon; ++t) {
    const RoundContexts rc = round_contexts(env, t, stream);
    const auto start = Clock::now();
    const std::size_t arm = policy->select_arm(rc, t, rng);
    busy += Clock::now() - start;
    const PullOutcome out = pull(env, rc, arm, stream);
    const auto resume = Clock::now();
    policy->observe(arm, rc.contexts.row(static_cast<Eigen::Index>(arm)).transpose(),
                    out.reward);
    busy += Clock::now() - resume;
    total += out.regret;
    if (t % config.record_every == 0 || t == config.horizon) {
      curve.rounds.push_back(t);
      curve.cum_regret.push_back(total);
    }
  }
  curve.seconds = std::chrono::duration<double>(busy).count();
  return curve;
}

std::vector<RegretCurve> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n_pol = config.policies.size();
  std::vector<RegretCurve> curves(config.replications * n_pol);
  parallel_for(config.replications, config.threads, [&](std::size_t rep) {
    const EnvSpec env = generate_env(config.setting, config.dim, config.arms(),
                                     replication_seed(config.master_seed, rep));
    for (std::size_t p = 0; p < n_pol; ++p) {
      curves[rep * n_pol + p] = run_policy(config, config.policies[p], env, rep);
    }
  });
  return curves;
}

std::vector<AggregateCurve> aggregate(const std::vector<RegretCurve>& curves) {
  std::vector<AggregateCurve> out;
  std::map<std::string, std::vector<const RegretCurve*>> groups;
  for (const auto& c : curves) {
    auto& g = groups[c.policy];
    if (g.empty()) {
      AggregateCurve a;
      a.policy = c.policy;
      a.rounds = c.rounds;
      out.push_back(std::move(a));
    } else if (c.rounds != g.front()->rounds) {
      throw RuntimeError("aggregate: recorded rounds differ for policy " + c.policy);
    }
    g.push_back(&c);
  }
  for (auto& a : out) {
    const auto& g = groups[a.policy];
    const double n = static_cast<double>(g.size());
    a.reps = g.size();
    a.mean.assign(a.rounds.size(), 0.0);
    a.stderr_.assign(a.rounds.size(), 0.0);
    for (std::size_t i = 0; i < a.rounds.size(); ++i) {
      double sum = 0.0;
      for (const auto* c : g) sum += c->cum_regret[i];
      const double m = sum / n;
      double ss = 0.0;
      for (const auto* c : g) ss += (c->cum_regret[i] - m) * (c->cum_regret[i] - m);
      a.mean[i] = m;
      a.stderr_[i] = std::sqrt(ss / n / n);
    }
  }
  return out;
}

RunResult run_and_aggregate(const ExperimentConfig& config) {
  RunResult r;
  r.setting = config.setting;
  r.dim = config.dim;
  r.curves = run_experiment(config);
  r.aggregates = aggregate(r.curves);
  return r;
}

std::vector<TunePoint> tune_sigma_omega(const ExperimentConfig& config,
                                        const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("grid: must contain at least one value");
  for (const double v : grid) {
    if (!(v > 0.0)) throw ConfigError("grid: values must be positive, got " + format_double(v));
  }
  std::vector<TunePoint> points;
  for (const double v : grid) {
    ExperimentConfig c = config;
    PolicySpec spec;
    if (const auto* existing = config.find_policy("LinReBoot")) spec = *existing;
    spec.name = "LinReBoot";
    spec.params["sigma_omega"] = format_double(v);
    c.policies = {spec};
    TunePoint p;
    p.sigma_omega = v;
    p.result = run_and_aggregate(c);
    const auto& agg = p.result.aggregates.front();
    p.final_mean = agg.mean.back();
    p.final_stderr = agg.stderr_.back();
    points.push_back(std::move(p));
  }
  return points;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

// Shortest round-trip form, used in directory names.
std::string short_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeError("cannot write '" + path.string() + "'");
  return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw RuntimeError("write failed for '" + path.string() + "'");
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path,
                                               const std::string& header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cannot read '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || trim(line) != header) {
    throw RuntimeError(path.string() + ": expected header '" + header + "'");
  }
  const std::size_t cols = split(header, ',').size();
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != cols) {
      throw RuntimeError(path.string() + ":" + std::to_string(line_no) +
                         ": expected " + std::to_string(cols) + " fields");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

constexpr const char* kCurvesHeader = "setting,policy,d,seed,round,cum_regret";
constexpr const char* kAggHeader = "setting,policy,d,round,mean,stderr,reps";
constexpr const char* kTimingHeader = "setting,policy,d,seed,seconds";

void write_aggregates(const RunResult& result, const fs::path& path) {
  const std::string setting(to_string(result.setting));
  auto out = open_out(path);
  out << kAggHeader << '\n';
  for (const auto& a : result.aggregates) {
    for (std::size_t i = 0; i < a.rounds.size(); ++i) {
      out << setting << ',' << a.policy << ',' << result.dim << ',' << a.rounds[i] << ','
          << format_double(a.mean[i]) << ',' << format_double(a.stderr_[i]) << ','
          << a.reps << '\n';
    }
  }
  close_out(out, path);
}

}  // namespace

std::string results_stem(Setting setting, std::size_t dim) {
  return std::string(to_string(setting)) + "_" + std::to_string(dim);
}

void write_results(const RunResult& result, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeError("cannot create '" + dir + "': " + ec.message());
  const fs::path base = fs::path(dir) / results_stem(result.setting, result.dim);
  const std::string setting(to_string(result.setting));

  const fs::path curves_path = base.string() + "_curves.csv";
  auto curves = open_out(curves_path);
  curves << kCurvesHeader << '\n';
  for (const auto& c : result.curves) {
    for (std::size_t i = 0; i < c.rounds.size(); ++i) {
      curves << setting << ',' << c.policy << ',' << result.dim << ',' << c.seed << ','
             << c.rounds[i] << ',' << format_double(c.cum_regret[i]) << '\n';
    }
  }
  close_out(curves, curves_path);

  write_aggregates(result, base.string() + "_agg.csv");

  const fs::path timing_path = base.string() + "_timing.csv";
  auto timing = open_out(timing_path);
  timing << kTimingHeader << '\n';
  for (const auto& c : result.curves) {
    timing << setting << ',' << c.policy << ',' << result.dim << ',' << c.seed << ','
           << format_double(c.seconds) << '\n';
  }
  close_out(timing, timing_path);
}

RunResult read_results(const std::string& dir, Setting setting, std::size_t dim) {
  RunResult r;
  r.setting = setting;
  r.dim = dim;
  const fs::path base = fs::path(dir) / results_stem(setting, dim);

  for (const auto& row : read_csv(base.string() + "_curves.csv", kCurvesHeader)) {
    const std::uint64_t seed = parse_count(row[3], "seed");
    if (r.curves.empty() || r.curves.back().policy != row[1] || r.curves.back().seed != seed) {
      RegretCurve c;
      c.policy = row[1];
      c.seed = seed;
      r.curves.push_back(std::move(c));
    }
    r.curves.back().rounds.push_back(parse_count(row[4], "round"));
    r.curves.back().cum_regret.push_back(parse_real(row[5], "cum_regret"));
  }

  const fs::path timing_path = base.string() + "_timing.csv";
  if (fs::exists(timing_path)) {
    for (const auto& row : read_csv(timing_path, kTimingHeader)) {
      const std::uint64_t seed = parse_count(row[3], "seed");
      for (auto& c : r.curves) {
        if (c.policy == row[1] && c.seed == seed) c.seconds = parse_real(row[4], "seconds");
      }
    }
  }

  const fs::path agg_path = base.string() + "_agg.csv";
  if (fs::exists(agg_path)) {
    for (const auto& row : read_csv(agg_path, kAggHeader)) {
      if (r.aggregates.empty() || r.aggregates.back().policy != row[1]) {
        AggregateCurve a;
        a.policy = row[1];
        a.reps = parse_count(row[6], "reps");
        r.aggregates.push_back(std::move(a));
      }
      auto& a = r.aggregates.back();
      a.rounds.push_back(parse_count(row[3], "round"));
      a.mean.push_back(parse_real(row[4], "mean"));
      a.stderr_.push_back(parse_real(row[5], "stderr"));
    }
  }
  return r;
}

void write_tuning(const std::vector<TunePoint>& points, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeError("cannot create '" + dir + "': " + ec.message());
  const fs::path summary_path = fs::path(dir) / "tune_summary.csv";
  auto out = open_out(summary_path);
  out << "setting,d,sigma_omega,final_mean,final_stderr,reps\n";
  for (const auto& p : points) {
    write_results(p.result, (fs::path(dir) / ("sigma_" + short_double(p.sigma_omega))).string());
    out << to_string(p.result.setting) << ',' << p.result.dim << ','
        << format_double(p.sigma_omega) << ',' << format_double(p.final_mean) << ','
        << format_double(p.final_stderr) << ',' << p.result.aggregates.front().reps << '\n';
  }
  close_out(out, summary_path);
}

std::string export_results(const std::string& dir) {
  if (!fs::is_directory(dir)) throw RuntimeError("not a directory: '" + dir + "'");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    const std::string suffix = "_curves.csv";
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw RuntimeError("no *_curves.csv files in '" + dir + "'");

  std::ostringstream summary;
  summary << "setting,policy,d,round,mean,stderr,reps\n";
  for (const auto& f : files) {
    const std::string stem = f.filename().string();
    const std::string head = stem.substr(0, stem.size() - std::string("_curves.csv").size());
    const auto us = head.rfind('_');
    if (us == std::string::npos) throw RuntimeError("unexpected file name '" + stem + "'");
    const Setting setting = parse_setting(head.substr(0, us));
    const std::size_t dim = parse_count(head.substr(us + 1), "d");
    RunResult r = read_results(dir, setting, dim);
    r.aggregates = aggregate(r.curves);
    write_aggregates(r, fs::path(dir) / (head + "_agg.csv"));
    for (const auto& a : r.aggregates) {
      if (a.rounds.empty()) continue;
      summary << to_string(setting) << ',' << a.policy << ',' << dim << ','
              << a.rounds.back() << ',' << format_double(a.mean.back()) << ','
              << format_double(a.stderr_.back()) << ',' << a.reps << '\n';
    }
  }
  return summary.str();
}

}  // namespace linreboot
