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

#ifndef XRSCHED_ENV_MDP_HPP_
#define XRSCHED_ENV_MDP_HPP_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "xrsched/baselines.hpp"
#include "xrsched/grid_model.hpp"
#include "xrsched/qoe_model.hpp"
#include "xrsched/scenario.hpp"

namespace xrsched {

struct RewardParams {
  double weight = 0.5;              // share of the QoE increment
  double time_penalty = -0.01;      // per-step term
  double terminal_bonus = 500.0;    // successful termination
  double violation_penalty = -2.0;  // constraints became unsatisfiable

  friend bool operator==(const RewardParams&, const RewardParams&) = default;
};

void ValidateRewardParams(const RewardParams& params);

struct Action {
  int mu = 0;
  int eta = 0;
  friend bool operator==(const Action&, const Action&) = default;
};

// Cartesian product numerology_set x minislot_set, numerology-major.
std::vector<Action> BuildActionSet(const ScenarioConfig& config);

using ActionMask = std::vector<bool>;

enum class Phase : std::uint8_t { kBt, kEt, kDone };

enum class RewardBranch : std::uint8_t { kShaped, kTerminalSuccess, kViolation };

struct UeProgress {
  std::vector<BwpAllocation> allocations;
  int bt_rbs = 0;
  int et_rbs = 0;
  int bt_count = 0;
  int et_count = 0;
  QoeReport qoe;
  // Minimum BT QoE reached; the UE moved on to the ET round.
  bool bt_complete = false;
  // Every placeable BT action would have broken the peak cap.
  bool bt_excluded = false;
  // The minimum BT QoE can no longer be reached this episode.
  bool unreachable = false;

  bool failed() const { return unreachable || (bt_excluded && !bt_complete); }
};

// Compact state snapshot: grid cell codes (see ResourceGrid) and the
// auxiliary feature vector.
struct Observation {
  int height = 0;  // frequency rows
  int width = 0;   // time columns
  int n_ues = 0;
  std::vector<std::uint8_t> cells;
  std::vector<float> aux;
};

inline constexpr int kGridChannels = 3;

// Dense network input: channels x height x width grid map plus aux vector.
struct FeatureEncoding {
  int channels = kGridChannels;
  int height = 0;
  int width = 0;
  std::vector<float> grid;
  std::vector<float> aux;
};

// Channel 0 occupancy, channel 1 owner (index + 1) / N, channel 2 ET flag.
FeatureEncoding ExpandObservation(const Observation& obs);

int AuxFeatureCount(int n_ues);

struct StepResult {
  double reward = 0.0;
  bool done = false;
  RewardBranch branch = RewardBranch::kShaped;
  double delta_qoe = 0.0;
};

struct StepRecord {
  int t = 0;
  int ue = 0;
  Tier tier = Tier::kBt;
  int action_index = 0;
  Action action;
  Placement placement;
  double reward = 0.0;
  std::vector<double> q_combined;
};

// One frame's allocation episode.
//
// UEs are served in descending order of their QoE under the equal
// time-frequency split. Each UE in turn receives BT bandwidth parts until its
// BT QoE reaches the minimum; then served UEs take turns receiving one ET
// bandwidth part each until no ET action fits. Rewards: the shaped QoE
// increment mid-episode, the terminal bonus when the episode ends with every
// UE served, the violation penalty when a UE becomes unservable or the episode
// ends with one unserved.
class Environment {
 public:
  Environment(std::shared_ptr<const Scenario> scenario, RewardParams reward,
              int max_steps);

  void Reset();
  ActionMask FeasibleActions() const;
  // Throws LifecycleError after termination and ContractError for a masked
  // or out-of-range action.
  StepResult Step(int action_index);

  Observation Observe() const;
  FeatureEncoding Encode() const { return ExpandObservation(Observe()); }

  const Scenario& scenario() const { return *scenario_; }
  const RewardParams& reward_params() const { return reward_; }
  const std::vector<Action>& actions() const { return actions_; }
  int num_actions() const { return static_cast<int>(actions_.size()); }
  int max_steps() const { return max_steps_; }
  const ResourceGrid& grid() const { return grid_; }
  const std::vector<UeProgress>& ues() const { return ues_; }
  const std::vector<int>& serving_order() const { return order_; }
  int step_count() const { return step_; }
  Phase phase() const { return phase_; }
  bool done() const { return phase_ == Phase::kDone; }
  // Meaningful once done: every UE served.
  bool success() const;
  int active_ue() const;
  Tier active_tier() const { return phase_ == Phase::kEt ? Tier::kEt : Tier::kBt; }

  int ServedCount() const;
  // Sum of q_combined over served UEs.
  double TotalQoe() const;
  std::vector<BwpAllocation> AllAllocations() const;
  AllocationPlan ToPlan() const;

  void set_record_trace(bool on) { record_trace_ = on; }
  const std::vector<StepRecord>& trace() const { return trace_; }

 private:
  ActionMask MaskFor(int ue, Tier tier) const;
  bool CapAllows(const UeProgress& p, Tier tier) const;
  double BtQoeWithRbs(int ue, int bt_rbs) const;
  bool CanStillReachMinimum(int ue) const;
  void RefreshQoe(int ue);
  // Returns the number of UEs that newly failed while advancing.
  int AdvanceBt();
  void AdvanceEt(int start_pos);
  int MarkUnreachable();

  std::shared_ptr<const Scenario> scenario_;
  RewardParams reward_;
  int max_steps_;
  std::vector<Action> actions_;
  std::vector<BwpShape> shapes_;
  int max_shape_area_ = 0;

  ResourceGrid grid_;
  std::vector<UeProgress> ues_;
  std::vector<int> order_;
  int cursor_ = 0;  // position in order_
  int step_ = 0;
  Phase phase_ = Phase::kBt;
  bool record_trace_ = false;
  std::vector<StepRecord> trace_;
};

// Serving order: UE indices by descending equal time-frequency q_combined,
// lower index first on ties.
std::vector<int> InitialServingOrder(const Scenario& scenario);

// One JSON object per line: t, ue, tier, action, placement, reward, qoe.
void WriteTraceJsonl(std::ostream& out, const std::vector<StepRecord>& trace);

}  // namespace xrsched

#endif  // XRSCHED_ENV_MDP_HPP_
