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

#ifndef XRSCHED_SCENARIO_HPP_
#define XRSCHED_SCENARIO_HPP_

#include <cstdint>
#include <vector>

#include "xrsched/grid_model.hpp"
#include "xrsched/qoe_model.hpp"
#include "xrsched/radio_link.hpp"
#include "xrsched/rng.hpp"

namespace xrsched {

// Everything that defines one family of problem instances. Defaults are the
// four-UE, 28 GHz, 56x24-grid reference profile.
struct ScenarioConfig {
  int n_ues = 4;
  double cell_radius_m = 200.0;
  double min_distance_m = 1.0;
  GridSpec grid;
  LinkParams link;
  std::vector<int> numerology_set{4, 5, 6};
  std::vector<int> minislot_set{2, 4, 7};
  std::vector<double> min_qoe_vector{4.9, 4.6, 4.8, 4.6};
  double peak_factor = 5.0;

  // FoV prediction probability: parent normal, conditioned on [low, high].
  double fov_mean = 0.8;
  double fov_variance = 0.49;
  double fov_low = 0.6;
  double fov_high = 1.0;

  double qoe_a = 0.0;
  double qoe_b = 1.0;
  double bt_coverage_deg2 = 360.0 * 180.0;
  double et_coverage_deg2 = 135.0 * 135.0;
  double qoe_log_base = 0.0;
  RateNormalization rate_normalization = RateNormalization::kPerSecond;

  // Upper bound on bandwidth parts per UE and tier; 0 means unbounded.
  int max_bwps_per_tier = 0;

  std::uint64_t rng_seed = 7;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Throws ConfigError describing the first violated invariant.
void ValidateScenarioConfig(const ScenarioConfig& config);

struct UeProfile {
  int index = 0;
  double distance_m = 0.0;
  double fov_prob = 0.0;
  QoeParams qoe;
  LinkState link;
};

// A sampled instance: configuration, derived grid and UE population.
struct Scenario {
  ScenarioConfig config;
  GridDims dims;
  std::vector<UeProfile> ues;

  int n_ues() const { return static_cast<int>(ues.size()); }
  double frame_duration_s() const { return config.grid.frame_duration_ms * 1e-3; }
  // Per-frame bits carried by one resource block for this UE.
  double BitsPerRb(int ue) const {
    return BwpRateBits(dims.rb_size_shz, ues[static_cast<std::size_t>(ue)].link.snr_linear);
  }
};

// Truncated normal by rejection from the parent. Throws InternalError after
// one million rejected draws.
double SampleFovProb(Rng& rng, double mean, double variance, double low,
                     double high);

UeProfile MakeUeProfile(const ScenarioConfig& config, int index,
                        double distance_m, double fov_prob);

// d ~ U[min_distance, cell_radius], rho truncated normal, a/b and minimum
// QoE from the configuration in index order.
std::vector<UeProfile> SampleScenario(const ScenarioConfig& config, Rng& rng);

Scenario MakeScenario(const ScenarioConfig& config, Rng& rng);
Scenario MakeScenario(const ScenarioConfig& config,
                      const std::vector<double>& distances_m,
                      const std::vector<double>& fov_probs);

}  // namespace xrsched

#endif  // XRSCHED_SCENARIO_HPP_
