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

#ifndef XRSCHED_EXPERIMENT_HPP_
#define XRSCHED_EXPERIMENT_HPP_

#include <string>
#include <vector>

#include "xrsched/dqn_agent.hpp"
#include "xrsched/experiment_config.hpp"
#include "xrsched/oracle.hpp"

namespace xrsched {

inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "0.1.0";

inline constexpr const char* kTrainingCsvHeader =
    "episode,total_reward,moving_avg_reward,steps,served_pct,total_qoe,epsilon";
inline constexpr const char* kEvalCsvHeader = "trial,method,total_qoe,served_count,per_ue_qoe";

inline constexpr const char* kMethodDqn = "dqn";
inline constexpr const char* kMethodEqualBandwidth = "equal_bandwidth";
inline constexpr const char* kMethodEqualTimeFrequency = "equal_time_frequency";
inline constexpr const char* kMethodOracle = "oracle";

// Writes to a sibling temp file and renames it over `path`. Throws IoError.
void WriteFileAtomic(const std::string& path, const std::string& contents);

std::string TrainingCsv(const std::vector<EpisodeMetrics>& metrics);

struct EvalRow {
  int trial = 0;
  std::string method;
  double total_qoe = 0.0;
  int served_count = 0;
  // q_combined per UE in index order; 0 for a UE with no BT allocation.
  std::vector<double> per_ue_qoe;
};

// Rows sorted by (trial, method name). per_ue_qoe is ';'-separated.
std::string EvalCsv(std::vector<EvalRow> rows);
EvalRow MakeEvalRow(int trial, const std::string& method, const AllocationPlan& plan);

// Episode e of training runs on a scenario drawn from the train-scenario
// stream with index e.
EnvFactory MakeTrainEnvFactory(const ExperimentConfig& config);
Scenario EvalScenario(const ExperimentConfig& config, int trial);
Scenario OracleScenario(const ExperimentConfig& config, int trial);

TrainResult TrainAgent(const ExperimentConfig& config, const EpisodeCallback& on_episode = {});

// Runs `methods` on trials [0, n_trials) drawn by `make_scenario`, using up
// to `jobs` threads. `params` may be null when no dqn method is requested.
std::vector<EvalRow> EvaluateTrials(const ExperimentConfig& config,
                                    const std::vector<float>* params,
                                    const std::vector<std::string>& methods, int n_trials,
                                    Scenario (*make_scenario)(const ExperimentConfig&, int),
                                    int jobs);

std::vector<std::string> ParseMethods(const std::string& list);

// Each writes its files into config.output_dir.
// training.csv, checkpoint.bin, run_manifest.json
TrainResult RunTrain(const ExperimentConfig& config, const EpisodeCallback& on_episode = {});
// eval.csv, run_manifest.json
std::vector<EvalRow> RunEval(const ExperimentConfig& config, const std::string& checkpoint,
                             const std::vector<std::string>& methods, int jobs);
// oracle.csv (oracle, baselines and, with a checkpoint, dqn), run_manifest.json.
// Checks every instance against the oracle limits before writing anything.
std::vector<EvalRow> RunOracle(const ExperimentConfig& config, const std::string& checkpoint,
                               int jobs);

void WriteRunManifest(const ExperimentConfig& config, const std::string& command,
                      const std::vector<std::string>& files);

}  // namespace xrsched

#endif  // XRSCHED_EXPERIMENT_HPP_
