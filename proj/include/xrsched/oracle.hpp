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

#ifndef XRSCHED_ORACLE_HPP_
#define XRSCHED_ORACLE_HPP_

#include <cstdint>
#include <vector>

#include "xrsched/baselines.hpp"
#include "xrsched/env_mdp.hpp"
#include "xrsched/scenario.hpp"

namespace xrsched {

struct OracleLimits {
  int max_ues = 2;
  int max_time_units = 16;
  int max_freq_units = 8;
  int max_bwps_per_tier = 2;
  int max_actions = 4;
  std::int64_t node_budget = 1'000'000;
};

struct OracleResult {
  AllocationPlan plan;
  // Action indices of the best episode.
  std::vector<int> actions;
  std::int64_t nodes_visited = 0;
};

// Upper bound on search-tree nodes: sum over depths d <= D of A^d, with
// D = 2 * n_ues * max_bwps_per_tier episode steps.
std::int64_t EstimateOracleNodes(const Scenario& scenario);

// Exhaustive search over every action sequence the environment admits,
// maximizing the terminal total QoE. Among equal totals the lexicographically
// smallest action sequence wins. Throws SizeError when the instance exceeds
// the limits or the node estimate exceeds the budget.
OracleResult OracleBestPlan(const Scenario& scenario, const RewardParams& reward,
                            int max_steps, const OracleLimits& limits = {});

}  // namespace xrsched

#endif  // XRSCHED_ORACLE_HPP_
