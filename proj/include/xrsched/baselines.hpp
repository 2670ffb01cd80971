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

#ifndef XRSCHED_BASELINES_HPP_
#define XRSCHED_BASELINES_HPP_

#include <span>
#include <string_view>
#include <vector>

#include "xrsched/grid_model.hpp"
#include "xrsched/qoe_model.hpp"
#include "xrsched/scenario.hpp"

namespace xrsched {

// A complete frame schedule and its score: sum of q_combined over served UEs.
struct AllocationPlan {
  std::vector<BwpAllocation> allocations;
  std::vector<QoeReport> per_ue;
  double total_qoe = 0.0;
  int served_count = 0;
};

// Scores an allocation list: sums per-tier bits per UE and applies the QoE
// model. `include_et == false` scores every UE on its BT rate alone.
AllocationPlan EvaluatePlan(const Scenario& scenario,
                            std::vector<BwpAllocation> allocations,
                            bool include_et = true);

// Frequency rows handed to each UE by the equal splits, in UE-index order
// from the lowest row. Widths differ by at most one row.
std::vector<int> EqualRowSplit(int n_freq_units, int n_ues);

// Whole-frame band per UE, all BT, scored without the ET term.
AllocationPlan EqualBandwidthPlan(const Scenario& scenario);

// Band per UE; the first half of the frame is BT and the second half ET.
// With an odd number of mu_min symbols the extra symbol goes to ET.
AllocationPlan EqualTimeFrequencyPlan(const Scenario& scenario);

// Covers a rectangle with mu_min bandwidth parts, one row at a time. Throws
// ConfigError if the column count is not a multiple of the mu_min symbol
// length.
std::vector<BwpAllocation> TileBand(const GridSpec& spec, int ue_index,
                                    Tier tier, int time_offset, int time_len,
                                    int freq_offset, int freq_width);

}  // namespace xrsched

#endif  // XRSCHED_BASELINES_HPP_
