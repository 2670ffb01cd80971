// Copyright 2026 The xrsched Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xrsched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "xrsched/checkpoint.hpp"
#include "xrsched/errors.hpp"

namespace xrsched {
namespace {

namespace fs = std::filesystem;

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

bool IsKnownMethod(const std::string& m) {
  return m == kMethodDqn || m == kMethodEqualBandwidth || m == kMethodEqualTimeFrequency ||
         m == kMethodOracle;
}

std::string OutputPath(const ExperimentConfig& config, const std::string& name) {
  return (fs::path(config.output_dir) / name).string();
}

void EnsureOutputDir(const ExperimentConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec || !fs::is_directory(config.output_dir)) {
    throw IoError("cannot create output directory " + config.output_dir);
  }
}

AllocationPlan GreedyPlan(const ExperimentConfig& config, const DqnAgent& agent,
                          const Scenario& scenario) {
  Environment env(std::make_shared<const Scenario>(scenario), config.reward,
                  config.train.max_steps);
  return RunGreedyEpisode(agent, env).plan;
}

}  // namespace

void WriteFileAtomic(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path);
  }
}

std::string TrainingCsv(const std::vector<EpisodeMetrics>& metrics) {
  std::ostringstream out;
  out << kTrainingCsvHeader << '\n';
  for (const auto& m : metrics) {
    out << m.episode << ',' << Num(m.total_reward) << ',' << Num(m.moving_avg_reward) << ','
        << m.steps << ',' << Num(m.served_pct) << ',' << Num(m.total_qoe) << ','
        << Num(m.epsilon) << '\n';
  }
  return out.str();
}

EvalRow MakeEvalRow(int trial, const std::string& method, const AllocationPlan& plan) {
  EvalRow row;
  row.trial = trial;
  row.method = method;
  row.total_qoe = plan.total_qoe;
  row.served_count = plan.served_count;
  for (const auto& r : plan.per_ue) row.per_ue_qoe.push_back(r.evaluated ? r.q_combined : 0.0);
  return row;
}

std::string EvalCsv(std::vector<EvalRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const EvalRow& a, const EvalRow& b) {
    return a.trial != b.trial ? a.trial < b.trial : a.method < b.method;
  });
  std::ostringstream out;
  out << kEvalCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.trial << ',' << r.method << ',' << Num(r.total_qoe) << ',' << r.served_count << ',';
    for (std::size_t i = 0; i < r.per_ue_qoe.size(); ++i) {
      if (i) out << ';';
      out << Num(r.per_ue_qoe[i]);
    }
    out << '\n';
  }
  return out.str();
}

EnvFactory MakeTrainEnvFactory(const ExperimentConfig& config) {
  return [config](int episode) {
    Rng rng = Rng::ForStream(config.scenario.rng_seed, StreamDomain::kTrainScenario,
                             static_cast<std::uint64_t>(episode));
    auto scenario = std::make_shared<const Scenario>(MakeScenario(config.scenario, rng));
    return Environment(scenario, config.reward, config.train.max_steps);
  };
}

Scenario EvalScenario(const ExperimentConfig& config, int trial) {
  Rng rng = Rng::ForStream(config.scenario.rng_seed, StreamDomain::kEvalScenario,
                           static_cast<std::uint64_t>(trial));
  return MakeScenario(config.scenario, rng);
}

Scenario OracleScenario(const ExperimentConfig& config, int trial) {
  Rng rng = Rng::ForStream(config.scenario.rng_seed, StreamDomain::kOracleScenario,
                           static_cast<std::uint64_t>(trial));
  return MakeScenario(config.scenario, rng);
}

TrainResult TrainAgent(const ExperimentConfig& config, const EpisodeCallback& on_episode) {
  ValidateExperimentConfig(config);
  return Train(MakeTrainEnvFactory(config), MakeNetworkConfig(config.scenario, config.train),
               config.train, on_episode);
}

std::vector<EvalRow> EvaluateTrials(const ExperimentConfig& config,
                                    const std::vector<float>* params,
                                    const std::vector<std::string>& methods, int n_trials,
                                    Scenario (*make_scenario)(const ExperimentConfig&, int),
                                    int jobs) {
  for (const auto& m : methods) {
    if (!IsKnownMethod(m)) throw ConfigError("unknown method '" + m + "'");
  }
  const bool wants_dqn = std::find(methods.begin(), methods.end(), kMethodDqn) != methods.end();
  std::unique_ptr<DqnAgent> agent;
  if (wants_dqn) {
    if (params == nullptr) throw ConfigError("method dqn needs trained parameters");
    agent = std::make_unique<DqnAgent>(MakeNetworkConfig(config.scenario, config.train),
                                       config.train);
    agent->SetParams(*params);
  }

  std::vector<std::vector<EvalRow>> per_trial(static_cast<std::size_t>(n_trials));
  std::atomic<int> next{0};
  std::mutex error_mu;
  std::exception_ptr error;
  auto worker = [&] {
    for (int t = next++; t < n_trials; t = next++) {
      try {
        const Scenario scenario = make_scenario(config, t);
        auto& rows = per_trial[static_cast<std::size_t>(t)];
        for (const auto& m : methods) {
          AllocationPlan plan;
          if (m == kMethodDqn) {
            plan = GreedyPlan(config, *agent, scenario);
          } else if (m == kMethodEqualBandwidth) {
            plan = EqualBandwidthPlan(scenario);
          } else if (m == kMethodEqualTimeFrequency) {
            plan = EqualTimeFrequencyPlan(scenario);
          } else {
            plan = OracleBestPlan(scenario, config.reward, config.train.max_steps).plan;
          }
          rows.push_back(MakeEvalRow(t, m, plan));
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next = n_trials;
      }
    }
  };
  const int n_threads = std::max(1, std::min(jobs, n_trials));
  std::vector<std::thread> threads;
  for (int i = 1; i < n_threads; ++i) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);

  std::vector<EvalRow> out;
  for (auto& rows : per_trial) {
    for (auto& r : rows) out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::string> ParseMethods(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    if (!IsKnownMethod(item)) throw ConfigError("unknown method '" + item + "'");
    if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
  }
  if (out.empty()) throw ConfigError("method list is empty");
  return out;
}

void WriteRunManifest(const ExperimentConfig& config, const std::string& command,
                      const std::vector<std::string>& files) {
  nlohmann::json j;
  j["schema_version"] = kCsvSchemaVersion;
  j["code_version"] = kCodeVersion;
  j["command"] = command;
  j["seed"] = config.train.seed;
  j["scenario_seed"] = config.scenario.rng_seed;
  j["config"] = ToJson(config);
  j["files"] = files;
  j["csv_headers"] = {{"training.csv", kTrainingCsvHeader},
                      {"eval.csv", kEvalCsvHeader},
                      {"oracle.csv", kEvalCsvHeader}};
  WriteFileAtomic(OutputPath(config, "run_manifest.json"), j.dump(2) + "\n");
}

TrainResult RunTrain(const ExperimentConfig& config, const EpisodeCallback& on_episode) {
  ValidateExperimentConfig(config);
  EnsureOutputDir(config);
  TrainResult result = TrainAgent(config, on_episode);
  WriteFileAtomic(OutputPath(config, "training.csv"), TrainingCsv(result.metrics));
  SaveCheckpoint(OutputPath(config, "checkpoint.bin"),
                 MakeNetworkConfig(config.scenario, config.train), result.params);
  WriteRunManifest(config, "train", {"training.csv", "checkpoint.bin"});
  return result;
}

std::vector<EvalRow> RunEval(const ExperimentConfig& config, const std::string& checkpoint,
                             const std::vector<std::string>& methods, int jobs) {
  ValidateExperimentConfig(config);
  std::vector<float> params;
  const bool wants_dqn = std::find(methods.begin(), methods.end(), kMethodDqn) != methods.end();
  if (wants_dqn) {
    params = LoadCheckpoint(checkpoint, MakeNetworkConfig(config.scenario, config.train));
  }
  EnsureOutputDir(config);
  auto rows = EvaluateTrials(config, wants_dqn ? &params : nullptr, methods,
                             config.n_eval_trials, &EvalScenario, jobs);
  WriteFileAtomic(OutputPath(config, "eval.csv"), EvalCsv(rows));
  WriteRunManifest(config, "eval", {"eval.csv"});
  return rows;
}

std::vector<EvalRow> RunOracle(const ExperimentConfig& config, const std::string& checkpoint,
                               int jobs) {
  ValidateExperimentConfig(config);
  std::vector<std::string> methods{kMethodOracle, kMethodEqualBandwidth,
                                   kMethodEqualTimeFrequency};
  std::vector<float> params;
  if (!checkpoint.empty()) {
    params = LoadCheckpoint(checkpoint, MakeNetworkConfig(config.scenario, config.train));
    methods.push_back(kMethodDqn);
  }
  // Refuse oversize instances up front so no partial output is produced.
  for (int t = 0; t < config.n_eval_trials; ++t) {
    const Scenario s = OracleScenario(config, t);
    OracleBestPlan(s, config.reward, 0);
  }
  EnsureOutputDir(config);
  auto rows = EvaluateTrials(config, checkpoint.empty() ? nullptr : &params, methods,
                             config.n_eval_trials, &OracleScenario, jobs);
  WriteFileAtomic(OutputPath(config, "oracle.csv"), EvalCsv(rows));
  WriteRunManifest(config, "oracle", {"oracle.csv"});
  return rows;
}

}  // namespace xrsched
