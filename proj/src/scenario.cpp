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

#include "xrsched/scenario.hpp"

#include <cmath>
#include <set>
#include <string>

#include "xrsched/errors.hpp"

namespace xrsched {

void ValidateScenarioConfig(const ScenarioConfig& c) {
  if (c.n_ues < 1 || c.n_ues > 127) throw ConfigError("n_ues must be in [1, 127]");
  if (!(c.min_distance_m >= 1.0) || !(c.cell_radius_m >= c.min_distance_m)) {
    throw ConfigError("distances must satisfy 1 <= min_distance_m <= cell_radius_m");
  }
  DeriveGrid(c.grid);
  if (c.numerology_set.empty() || c.minislot_set.empty()) {
    throw ConfigError("numerology_set and minislot_set must be non-empty");
  }
  for (int mu : c.numerology_set) {
    if (mu < c.grid.mu_min || mu > c.grid.mu_max) {
      throw ConfigError("numerology " + std::to_string(mu) +
                        " outside [mu_min, mu_max]");
    }
  }
  for (int eta : c.minislot_set) {
    if (eta < 1 || eta > kMaxMinislotSymbols) {
      throw ConfigError("mini-slot " + std::to_string(eta) + " outside [1, 14]");
    }
  }
  if (std::set<int>(c.numerology_set.begin(), c.numerology_set.end()).size() !=
          c.numerology_set.size() ||
      std::set<int>(c.minislot_set.begin(), c.minislot_set.end()).size() !=
          c.minislot_set.size()) {
    throw ConfigError("action sets must not contain duplicates");
  }
  if (static_cast<int>(c.min_qoe_vector.size()) != c.n_ues) {
    throw ConfigError("min_qoe_vector must have exactly n_ues entries");
  }
  if (!(c.peak_factor >= 1.0)) throw ConfigError("peak_factor must be >= 1");
  if (!(c.fov_variance >= 0.0) || !(c.fov_low <= c.fov_high) || c.fov_low < 0.0 ||
      c.fov_high > 1.0) {
    throw ConfigError("FoV truncation must be a sub-interval of [0, 1]");
  }
  if (!(c.qoe_b > 0.0)) throw ConfigError("qoe_b must be positive");
  if (!(c.bt_coverage_deg2 > 0.0) || !(c.et_coverage_deg2 > 0.0)) {
    throw ConfigError("coverage areas must be positive");
  }
  if (c.qoe_log_base < 0.0 || c.qoe_log_base == 1.0) {
    throw ConfigError("qoe_log_base must be 0 (natural) or a positive base != 1");
  }
  if (c.max_bwps_per_tier < 0) throw ConfigError("max_bwps_per_tier must be >= 0");
  if (!(c.link.carrier_frequency_hz > 0.0)) {
    throw ConfigError("carrier_frequency_hz must be positive");
  }
}

double SampleFovProb(Rng& rng, double mean, double variance, double low,
                     double high) {
  const double sd = std::sqrt(variance);
  constexpr int kMaxDraws = 1'000'000;
  for (int i = 0; i < kMaxDraws; ++i) {
    const double x = rng.Normal(mean, sd);
    if (x >= low && x <= high) return x;
  }
  throw InternalError("truncated-normal sampler exceeded its retry budget");
}

UeProfile MakeUeProfile(const ScenarioConfig& c, int index, double distance_m,
                        double fov_prob) {
  UeProfile ue;
  ue.index = index;
  ue.distance_m = distance_m;
  ue.fov_prob = fov_prob;
  ue.qoe.a = c.qoe_a;
  ue.qoe.b = c.qoe_b;
  ue.qoe.fov_prob = fov_prob;
  ue.qoe.bt_coverage_deg2 = c.bt_coverage_deg2;
  ue.qoe.et_coverage_deg2 = c.et_coverage_deg2;
  ue.qoe.min_qoe = c.min_qoe_vector.at(static_cast<std::size_t>(index));
  ue.qoe.peak_factor = c.peak_factor;
  ue.qoe.log_base = c.qoe_log_base;
  ue.link = MakeLinkState(c.link, distance_m, c.n_ues);
  return ue;
}

std::vector<UeProfile> SampleScenario(const ScenarioConfig& config, Rng& rng) {
  std::vector<UeProfile> ues;
  ues.reserve(static_cast<std::size_t>(config.n_ues));
  for (int n = 0; n < config.n_ues; ++n) {
    const double d = rng.Uniform(config.min_distance_m, config.cell_radius_m);
    const double rho = SampleFovProb(rng, config.fov_mean, config.fov_variance,
                                     config.fov_low, config.fov_high);
    ues.push_back(MakeUeProfile(config, n, d, rho));
  }
  return ues;
}

Scenario MakeScenario(const ScenarioConfig& config, Rng& rng) {
  ValidateScenarioConfig(config);
  Scenario s;
  s.config = config;
  s.dims = DeriveGrid(config.grid);
  s.ues = SampleScenario(config, rng);
  return s;
}

Scenario MakeScenario(const ScenarioConfig& config,
                      const std::vector<double>& distances_m,
                      const std::vector<double>& fov_probs) {
  ValidateScenarioConfig(config);
  if (static_cast<int>(distances_m.size()) != config.n_ues ||
      static_cast<int>(fov_probs.size()) != config.n_ues) {
    throw ConfigError("explicit UE lists must have n_ues entries");
  }
  Scenario s;
  s.config = config;
  s.dims = DeriveGrid(config.grid);
  for (int n = 0; n < config.n_ues; ++n) {
    s.ues.push_back(MakeUeProfile(config, n, distances_m[static_cast<std::size_t>(n)],
                                  fov_probs[static_cast<std::size_t>(n)]));
  }
  return s;
}

}  // namespace xrsched
