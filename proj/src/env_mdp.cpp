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

#include "xrsched/env_mdp.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "xrsched/errors.hpp"

namespace xrsched {
namespace {

constexpr float kSpectralEfficiencyScale = 16.0f;

bool Any(const ActionMask& mask) {
  return std::find(mask.begin(), mask.end(), true) != mask.end();
}

}  // namespace

void ValidateRewardParams(const RewardParams& p) {
  if (p.weight < 0.0 || p.weight > 1.0) throw ConfigError("reward weight must be in [0, 1]");
}

std::vector<Action> BuildActionSet(const ScenarioConfig& config) {
  std::vector<Action> out;
  for (int mu : config.numerology_set) {
    for (int eta : config.minislot_set) out.push_back(Action{mu, eta});
  }
  return out;
}

int AuxFeatureCount(int n_ues) { return 7 * n_ues + 2; }

FeatureEncoding ExpandObservation(const Observation& obs) {
  FeatureEncoding enc;
  enc.height = obs.height;
  enc.width = obs.width;
  const std::size_t plane = static_cast<std::size_t>(obs.height) * obs.width;
  enc.grid.assign(kGridChannels * plane, 0.0f);
  const float owner_scale = 1.0f / static_cast<float>(std::max(obs.n_ues, 1));
  for (std::size_t i = 0; i < plane; ++i) {
    const std::uint8_t c = obs.cells[i];
    if (c == 0) continue;
    enc.grid[i] = 1.0f;
    enc.grid[plane + i] = static_cast<float>(c & 0x7f) * owner_scale;
    enc.grid[2 * plane + i] = (c & 0x80) ? 1.0f : 0.0f;
  }
  enc.aux = obs.aux;
  return enc;
}

std::vector<int> InitialServingOrder(const Scenario& scenario) {
  const int n = scenario.n_ues();
  const auto rows = EqualRowSplit(scenario.dims.n_freq_units, n);
  const int bt_cols = scenario.dims.n_time_units / 2;
  const int et_cols = scenario.dims.n_time_units - bt_cols;
  std::vector<double> key(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    const double bpr = scenario.BitsPerRb(u);
    const int w = rows[static_cast<std::size_t>(u)];
    const QoeReport r =
        EvaluateQoe(w * bt_cols * bpr, w * et_cols * bpr, scenario.frame_duration_s(),
                    scenario.ues[static_cast<std::size_t>(u)].qoe,
                    scenario.config.rate_normalization);
    key[static_cast<std::size_t>(u)] =
        r.evaluated ? r.q_combined : -std::numeric_limits<double>::infinity();
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return key[static_cast<std::size_t>(a)] > key[static_cast<std::size_t>(b)];
  });
  return order;
}

Environment::Environment(std::shared_ptr<const Scenario> scenario,
                         RewardParams reward, int max_steps)
    : scenario_(std::move(scenario)), reward_(reward), max_steps_(max_steps) {
  if (!scenario_) throw ContractError("environment needs a scenario");
  if (max_steps_ < 0) throw ConfigError("max_steps must be non-negative");
  ValidateRewardParams(reward_);
  actions_ = BuildActionSet(scenario_->config);
  for (const Action& a : actions_) {
    shapes_.push_back(MakeBwpShape(a.mu, a.eta, scenario_->config.grid));
    max_shape_area_ = std::max(max_shape_area_, shapes_.back().area_rbs());
  }
  Reset();
}

void Environment::Reset() {
  grid_ = ResourceGrid(scenario_->dims);
  ues_.assign(static_cast<std::size_t>(scenario_->n_ues()), UeProgress{});
  order_ = InitialServingOrder(*scenario_);
  cursor_ = 0;
  step_ = 0;
  phase_ = Phase::kBt;
  trace_.clear();
  MarkUnreachable();
  AdvanceBt();
  if (step_ >= max_steps_) phase_ = Phase::kDone;
}

int Environment::active_ue() const {
  if (phase_ == Phase::kDone) return -1;
  return order_[static_cast<std::size_t>(cursor_)];
}

bool Environment::success() const {
  return std::all_of(ues_.begin(), ues_.end(),
                     [](const UeProgress& p) { return p.qoe.served; });
}

bool Environment::CapAllows(const UeProgress& p, Tier tier) const {
  const int cap = scenario_->config.max_bwps_per_tier;
  if (cap == 0) return true;
  return (tier == Tier::kBt ? p.bt_count : p.et_count) < cap;
}

double Environment::BtQoeWithRbs(int ue, int bt_rbs) const {
  const auto& qoe = scenario_->ues[static_cast<std::size_t>(ue)].qoe;
  const double rate = EffectiveRate(bt_rbs * scenario_->BitsPerRb(ue),
                                    scenario_->frame_duration_s(),
                                    qoe.bt_coverage_deg2,
                                    scenario_->config.rate_normalization);
  if (!(rate > 0.0)) return -std::numeric_limits<double>::infinity();
  return QoeFn(rate, qoe);
}

ActionMask Environment::MaskFor(int ue, Tier tier) const {
  ActionMask mask(actions_.size(), false);
  const UeProgress& p = ues_[static_cast<std::size_t>(ue)];
  if (!CapAllows(p, tier)) return mask;
  const double peak = scenario_->ues[static_cast<std::size_t>(ue)].qoe.peak_qoe();
  for (std::size_t i = 0; i < shapes_.size(); ++i) {
    if (!grid_.FindPlacement(shapes_[i])) continue;
    if (tier == Tier::kBt && BtQoeWithRbs(ue, p.bt_rbs + shapes_[i].area_rbs()) > peak) {
      continue;
    }
    mask[i] = true;
  }
  return mask;
}

ActionMask Environment::FeasibleActions() const {
  if (done()) return ActionMask(actions_.size(), false);
  return MaskFor(active_ue(), active_tier());
}

bool Environment::CanStillReachMinimum(int ue) const {
  const UeProgress& p = ues_[static_cast<std::size_t>(ue)];
  int extra = grid_.free_cells();
  const int cap = scenario_->config.max_bwps_per_tier;
  if (cap > 0) extra = std::min(extra, (cap - p.bt_count) * max_shape_area_);
  const int bound = p.bt_rbs + std::max(extra, 0);
  if (bound == 0) return false;
  return MeetsMinimum(BtQoeWithRbs(ue, bound),
                      scenario_->ues[static_cast<std::size_t>(ue)].qoe);
}

int Environment::MarkUnreachable() {
  if (phase_ != Phase::kBt) return 0;
  int newly = 0;
  for (std::size_t pos = static_cast<std::size_t>(cursor_); pos < order_.size(); ++pos) {
    const int ue = order_[pos];
    UeProgress& p = ues_[static_cast<std::size_t>(ue)];
    if (p.bt_complete || p.failed()) continue;
    if (!CanStillReachMinimum(ue)) {
      p.unreachable = true;
      ++newly;
    }
  }
  return newly;
}

int Environment::AdvanceBt() {
  int newly = 0;
  const int n = static_cast<int>(order_.size());
  while (cursor_ < n) {
    const int ue = order_[static_cast<std::size_t>(cursor_)];
    UeProgress& p = ues_[static_cast<std::size_t>(ue)];
    if (p.bt_complete || p.failed()) {
      ++cursor_;
      continue;
    }
    if (Any(MaskFor(ue, Tier::kBt))) return newly;
    // Nothing admissible. If some shape still fits under the cap, the peak
    // cap is what blocked it.
    bool fits = false;
    if (CapAllows(p, Tier::kBt)) {
      for (const auto& s : shapes_) fits = fits || grid_.FindPlacement(s).has_value();
    }
    if (fits) {
      p.bt_excluded = true;
    } else {
      p.unreachable = true;
    }
    ++newly;
    ++cursor_;
  }
  phase_ = Phase::kEt;
  AdvanceEt(0);
  return newly;
}

void Environment::AdvanceEt(int start_pos) {
  const int n = static_cast<int>(order_.size());
  for (int k = 0; k < n; ++k) {
    const int pos = (start_pos + k) % n;
    const int ue = order_[static_cast<std::size_t>(pos)];
    if (!ues_[static_cast<std::size_t>(ue)].bt_complete) continue;
    if (Any(MaskFor(ue, Tier::kEt))) {
      cursor_ = pos;
      return;
    }
  }
  phase_ = Phase::kDone;
}

void Environment::RefreshQoe(int ue) {
  UeProgress& p = ues_[static_cast<std::size_t>(ue)];
  const double bpr = scenario_->BitsPerRb(ue);
  p.qoe = EvaluateQoe(p.bt_rbs * bpr, p.et_rbs * bpr, scenario_->frame_duration_s(),
                      scenario_->ues[static_cast<std::size_t>(ue)].qoe,
                      scenario_->config.rate_normalization);
}

StepResult Environment::Step(int action_index) {
  if (done()) throw LifecycleError("step called on a terminated episode");
  if (action_index < 0 || action_index >= num_actions()) {
    throw ContractError("action index out of range");
  }
  const ActionMask mask = FeasibleActions();
  if (!mask[static_cast<std::size_t>(action_index)]) {
    throw ContractError("action is masked in the current state");
  }
  const int ue = active_ue();
  const Tier tier = active_tier();
  UeProgress& p = ues_[static_cast<std::size_t>(ue)];
  const double before = p.qoe.evaluated ? p.qoe.q_combined : 0.0;

  const auto alloc = grid_.Place(ue, tier, shapes_[static_cast<std::size_t>(action_index)]);
  if (!alloc) throw InternalError("unmasked action failed to place");
  p.allocations.push_back(*alloc);
  if (tier == Tier::kBt) {
    p.bt_rbs += alloc->shape.area_rbs();
    ++p.bt_count;
  } else {
    p.et_rbs += alloc->shape.area_rbs();
    ++p.et_count;
  }
  RefreshQoe(ue);
  ++step_;

  StepResult result;
  result.delta_qoe = (p.qoe.evaluated ? p.qoe.q_combined : 0.0) - before;

  int newly_failed = 0;
  if (tier == Tier::kBt) {
    if (p.qoe.served) {
      p.bt_complete = true;
      ++cursor_;
    }
    newly_failed += MarkUnreachable();
    newly_failed += AdvanceBt();
  } else {
    AdvanceEt(cursor_ + 1);
  }
  if (step_ >= max_steps_) phase_ = Phase::kDone;

  result.done = done();
  if (result.done) {
    const bool ok = success();
    result.branch = ok ? RewardBranch::kTerminalSuccess : RewardBranch::kViolation;
    result.reward = ok ? reward_.terminal_bonus : reward_.violation_penalty;
  } else if (newly_failed > 0) {
    result.branch = RewardBranch::kViolation;
    result.reward = reward_.violation_penalty;
  } else {
    result.branch = RewardBranch::kShaped;
    result.reward = reward_.weight * result.delta_qoe +
                    (1.0 - reward_.weight) * reward_.time_penalty;
  }

  if (record_trace_) {
    StepRecord rec;
    rec.t = step_;
    rec.ue = ue;
    rec.tier = tier;
    rec.action_index = action_index;
    rec.action = actions_[static_cast<std::size_t>(action_index)];
    rec.placement = Placement{alloc->time_offset_units, alloc->freq_offset_units};
    rec.reward = result.reward;
    for (const auto& u : ues_) rec.q_combined.push_back(u.qoe.evaluated ? u.qoe.q_combined : 0.0);
    trace_.push_back(std::move(rec));
  }
  return result;
}

Observation Environment::Observe() const {
  Observation obs;
  obs.height = scenario_->dims.n_freq_units;
  obs.width = scenario_->dims.n_time_units;
  obs.n_ues = scenario_->n_ues();
  obs.cells.assign(grid_.codes().begin(), grid_.codes().end());
  obs.aux.reserve(static_cast<std::size_t>(AuxFeatureCount(obs.n_ues)));
  for (int u = 0; u < obs.n_ues; ++u) {
    const UeProgress& p = ues_[static_cast<std::size_t>(u)];
    const UeProfile& prof = scenario_->ues[static_cast<std::size_t>(u)];
    const bool ev = p.qoe.evaluated;
    obs.aux.push_back(ev ? static_cast<float>(p.qoe.q_bt / prof.qoe.min_qoe) : 0.0f);
    obs.aux.push_back(ev ? static_cast<float>(p.qoe.q_combined / prof.qoe.peak_qoe()) : 0.0f);
    obs.aux.push_back(p.qoe.served ? 1.0f : 0.0f);
    obs.aux.push_back(p.bt_excluded ? 1.0f : 0.0f);
    obs.aux.push_back(static_cast<float>(prof.fov_prob));
    obs.aux.push_back(static_cast<float>(prof.link.spectral_efficiency) / kSpectralEfficiencyScale);
  }
  const int active = active_ue();
  for (int u = 0; u < obs.n_ues; ++u) obs.aux.push_back(u == active ? 1.0f : 0.0f);
  obs.aux.push_back(phase_ == Phase::kEt ? 1.0f : 0.0f);
  obs.aux.push_back(max_steps_ > 0 ? static_cast<float>(step_) / static_cast<float>(max_steps_)
                                   : 1.0f);
  return obs;
}

int Environment::ServedCount() const {
  return static_cast<int>(std::count_if(ues_.begin(), ues_.end(),
                                        [](const UeProgress& p) { return p.qoe.served; }));
}

double Environment::TotalQoe() const {
  double total = 0.0;
  for (const auto& p : ues_) {
    if (p.qoe.served) total += p.qoe.q_combined;
  }
  return total;
}

std::vector<BwpAllocation> Environment::AllAllocations() const {
  std::vector<BwpAllocation> all;
  for (const auto& p : ues_) all.insert(all.end(), p.allocations.begin(), p.allocations.end());
  return all;
}

AllocationPlan Environment::ToPlan() const {
  return EvaluatePlan(*scenario_, AllAllocations(), /*include_et=*/true);
}

void WriteTraceJsonl(std::ostream& out, const std::vector<StepRecord>& trace) {
  for (const auto& r : trace) {
    nlohmann::json j;
    j["t"] = r.t;
    j["ue"] = r.ue;
    j["tier"] = std::string(TierName(r.tier));
    j["action"] = {{"index", r.action_index}, {"mu", r.action.mu}, {"eta", r.action.eta}};
    j["placement"] = {{"time", r.placement.time_offset}, {"freq", r.placement.freq_offset}};
    j["reward"] = r.reward;
    j["qoe"] = r.q_combined;
    out << j.dump() << '\n';
  }
}

}  // namespace xrsched
