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

#ifndef XRSCHED_EXPERIMENT_CONFIG_HPP_
#define XRSCHED_EXPERIMENT_CONFIG_HPP_

#include <functional>
#include <string>

#include <nlohmann/json.hpp>

#include "xrsched/dqn_agent.hpp"
#include "xrsched/env_mdp.hpp"
#include "xrsched/q_network.hpp"
#include "xrsched/scenario.hpp"

namespace xrsched {

struct ExperimentConfig {
  ScenarioConfig scenario;
  RewardParams reward;
  TrainConfig train;
  int n_eval_trials = 2000;
  std::string output_dir = "out";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

void ValidateExperimentConfig(const ExperimentConfig& config);

// JSON with the field names above as keys. Missing keys keep their
// defaults; unknown keys and type mismatches throw ConfigError.
nlohmann::json ToJson(const ExperimentConfig& config);
nlohmann::json ToJson(const QNetworkConfig& config);
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);
QNetworkConfig NetworkConfigFromJson(const nlohmann::json& j);

ExperimentConfig ParseExperimentConfig(const std::string& text);
std::string SerializeExperimentConfig(const ExperimentConfig& config);
ExperimentConfig LoadExperimentConfig(const std::string& path);

inline constexpr const char* kEnvPrefix = "XRSCHED_";

using EnvLookup = std::function<const char*(const std::string&)>;

// Every leaf key can be overridden by XRSCHED_<PATH>, the path being the
// upper-cased keys joined by '_' (e.g. XRSCHED_TRAIN_EPISODES,
// XRSCHED_SCENARIO_GRID_MU_MIN). Values are parsed as JSON, falling back to a
// plain string.
ExperimentConfig ApplyEnvOverrides(const ExperimentConfig& config, const EnvLookup& lookup);
ExperimentConfig ApplyEnvOverrides(const ExperimentConfig& config);

// Two-UE, 8x4-unit profile small enough for exhaustive search.
ExperimentConfig TinyExperimentConfig();

}  // namespace xrsched

#endif  // XRSCHED_EXPERIMENT_CONFIG_HPP_
