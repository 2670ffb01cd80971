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

#include "xrsched/baselines.hpp"

#include <algorithm>

#include "xrsched/errors.hpp"

namespace xrsched {

AllocationPlan EvaluatePlan(const Scenario& scenario,
                            std::vector<BwpAllocation> allocations,
                            bool include_et) {
  const auto n = static_cast<std::size_t>(scenario.n_ues());
  std::vector<int> bt_rbs(n, 0);
  std::vector<int> et_rbs(n, 0);
  for (const auto& a : allocations) {
    auto& bucket = a.tier == Tier::kBt ? bt_rbs : et_rbs;
    bucket.at(static_cast<std::size_t>(a.ue_index)) += a.shape.area_rbs();
  }
  AllocationPlan plan;
  plan.allocations = std::move(allocations);
  for (std::size_t u = 0; u < n; ++u) {
    const double bits_per_rb = scenario.BitsPerRb(static_cast<int>(u));
    const double bt = bt_rbs[u] * bits_per_rb;
    const double et = et_rbs[u] * bits_per_rb;
    QoeReport r = EvaluateQoe(bt, et, scenario.frame_duration_s(), scenario.ues[u].qoe,
                              scenario.config.rate_normalization, include_et);
    if (r.served) {
      plan.total_qoe += r.q_combined;
      ++plan.served_count;
    }
    plan.per_ue.push_back(r);
  }
  return plan;
}

std::vector<int> EqualRowSplit(int n_freq_units, int n_ues) {
  std::vector<int> rows(static_cast<std::size_t>(n_ues), n_freq_units / n_ues);
  for (int u = 0; u < n_freq_units % n_ues; ++u) ++rows[static_cast<std::size_t>(u)];
  return rows;
}

std::vector<BwpAllocation> TileBand(const GridSpec& spec, int ue_index,
                                    Tier tier, int time_offset, int time_len,
                                    int freq_offset, int freq_width) {
  std::vector<BwpAllocation> out;
  if (time_len <= 0 || freq_width <= 0) return out;
  const int symbol_len = 1 << (spec.mu_max - spec.mu_min);
  if (time_len % symbol_len != 0) {
    throw ConfigError("band of " + std::to_string(time_len) +
                      " time units is not a whole number of mu_min symbols");
  }
  for (int f = freq_offset; f < freq_offset + freq_width; ++f) {
    int remaining = time_len / symbol_len;
    int t = time_offset;
    while (remaining > 0) {
      const int eta = std::min(remaining, kMaxMinislotSymbols);
      BwpShape shape = MakeBwpShape(spec.mu_min, eta, spec);
      out.push_back(BwpAllocation{ue_index, tier, shape, t, f});
      t += shape.time_len_units;
      remaining -= eta;
    }
  }
  return out;
}

AllocationPlan EqualBandwidthPlan(const Scenario& scenario) {
  const auto rows = EqualRowSplit(scenario.dims.n_freq_units, scenario.n_ues());
  std::vector<BwpAllocation> allocs;
  int f = 0;
  for (int u = 0; u < scenario.n_ues(); ++u) {
    const int w = rows[static_cast<std::size_t>(u)];
    auto band = TileBand(scenario.config.grid, u, Tier::kBt, 0,
                         scenario.dims.n_time_units, f, w);
    allocs.insert(allocs.end(), band.begin(), band.end());
    f += w;
  }
  return EvaluatePlan(scenario, std::move(allocs), /*include_et=*/false);
}

AllocationPlan EqualTimeFrequencyPlan(const Scenario& scenario) {
  const auto rows = EqualRowSplit(scenario.dims.n_freq_units, scenario.n_ues());
  const int symbol_len = 1 << (scenario.config.grid.mu_max - scenario.config.grid.mu_min);
  const int bt_cols = scenario.dims.n_time_units / symbol_len / 2 * symbol_len;
  const int et_cols = scenario.dims.n_time_units - bt_cols;
  std::vector<BwpAllocation> allocs;
  int f = 0;
  for (int u = 0; u < scenario.n_ues(); ++u) {
    const int w = rows[static_cast<std::size_t>(u)];
    auto bt = TileBand(scenario.config.grid, u, Tier::kBt, 0, bt_cols, f, w);
    auto et = TileBand(scenario.config.grid, u, Tier::kEt, bt_cols, et_cols, f, w);
    allocs.insert(allocs.end(), bt.begin(), bt.end());
    allocs.insert(allocs.end(), et.begin(), et.end());
    f += w;
  }
  return EvaluatePlan(scenario, std::move(allocs), /*include_et=*/true);
}

}  // namespace xrsched
