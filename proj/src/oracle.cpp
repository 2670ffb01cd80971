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

#include "xrsched/oracle.hpp"

#include <memory>
#include <string>

#include "xrsched/errors.hpp"

namespace xrsched {
namespace {

struct Search {
  std::int64_t nodes = 0;
  bool found = false;
  double best = 0.0;
  std::vector<int> best_actions;
  std::vector<int> path;

  void Visit(const Environment& env) {
    ++nodes;
    if (env.done()) {
      const double total = env.TotalQoe();
      if (!found || total > best) {
        found = true;
        best = total;
        best_actions = path;
      }
      return;
    }
    const ActionMask mask = env.FeasibleActions();
    for (std::size_t a = 0; a < mask.size(); ++a) {
      if (!mask[a]) continue;
      Environment child = env;
      child.Step(static_cast<int>(a));
      path.push_back(static_cast<int>(a));
      Visit(child);
      path.pop_back();
    }
  }
};

}  // namespace

std::int64_t EstimateOracleNodes(const Scenario& scenario) {
  const std::int64_t actions = static_cast<std::int64_t>(scenario.config.numerology_set.size() *
                                                         scenario.config.minislot_set.size());
  const int depth = 2 * scenario.n_ues() * scenario.config.max_bwps_per_tier;
  std::int64_t total = 0;
  std::int64_t level = 1;
  for (int d = 0; d <= depth; ++d) {
    total += level;
    if (total > (std::int64_t{1} << 50)) return total;
    level *= actions;
  }
  return total;
}

OracleResult OracleBestPlan(const Scenario& scenario, const RewardParams& reward, int max_steps,
                            const OracleLimits& limits) {
  const auto& c = scenario.config;
  const int n_actions = static_cast<int>(c.numerology_set.size() * c.minislot_set.size());
  if (scenario.n_ues() > limits.max_ues) {
    throw SizeError("oracle supports at most " + std::to_string(limits.max_ues) + " UEs");
  }
  if (scenario.dims.n_time_units > limits.max_time_units ||
      scenario.dims.n_freq_units > limits.max_freq_units) {
    throw SizeError("oracle grid limit is " + std::to_string(limits.max_time_units) + "x" +
                    std::to_string(limits.max_freq_units) + " units");
  }
  if (c.max_bwps_per_tier < 1 || c.max_bwps_per_tier > limits.max_bwps_per_tier) {
    throw SizeError("oracle needs max_bwps_per_tier in [1, " +
                    std::to_string(limits.max_bwps_per_tier) + "]");
  }
  if (n_actions > limits.max_actions) {
    throw SizeError("oracle supports at most " + std::to_string(limits.max_actions) + " actions");
  }
  const std::int64_t estimate = EstimateOracleNodes(scenario);
  if (estimate > limits.node_budget) {
    throw SizeError("oracle search estimate of " + std::to_string(estimate) +
                    " nodes exceeds the budget");
  }

  Environment root(std::make_shared<const Scenario>(scenario), reward, max_steps);
  Search s;
  s.Visit(root);

  Environment replay = root;
  for (int a : s.best_actions) replay.Step(a);
  OracleResult out;
  out.plan = replay.ToPlan();
  out.actions = s.best_actions;
  out.nodes_visited = s.nodes;
  return out;
}

}  // namespace xrsched
