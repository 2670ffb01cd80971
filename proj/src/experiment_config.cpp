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

#include "xrsched/experiment_config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "xrsched/errors.hpp"

namespace xrsched {
namespace {

using nlohmann::json;

void CheckKeys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void Get(const json& j, const char* key, T& out, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

std::string NormalizationName(RateNormalization n) {
  return n == RateNormalization::kPerSecond ? "per_second" : "per_frame";
}

RateNormalization NormalizationFromName(const std::string& s) {
  if (s == "per_second") return RateNormalization::kPerSecond;
  if (s == "per_frame") return RateNormalization::kPerFrame;
  throw ConfigError("rate_normalization must be per_second or per_frame, got '" + s + "'");
}

json ConvToJson(const std::vector<ConvLayerSpec>& layers) {
  json out = json::array();
  for (const auto& l : layers) {
    out.push_back({{"filters", l.filters}, {"kernel", l.kernel}, {"stride", l.stride}});
  }
  return out;
}

std::vector<ConvLayerSpec> ConvFromJson(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array");
  std::vector<ConvLayerSpec> out;
  for (const auto& item : j) {
    CheckKeys(item, {"filters", "kernel", "stride"}, where);
    ConvLayerSpec l;
    Get(item, "filters", l.filters, where);
    Get(item, "kernel", l.kernel, where);
    Get(item, "stride", l.stride, where);
    out.push_back(l);
  }
  return out;
}

json ScenarioToJson(const ScenarioConfig& s) {
  return {
      {"n_ues", s.n_ues},
      {"cell_radius_m", s.cell_radius_m},
      {"min_distance_m", s.min_distance_m},
      {"grid",
       {{"mu_min", s.grid.mu_min},
        {"mu_max", s.grid.mu_max},
        {"frame_duration_ms", s.grid.frame_duration_ms},
        {"system_bandwidth_khz", s.grid.system_bandwidth_khz}}},
      {"link",
       {{"carrier_frequency_hz", s.link.carrier_frequency_hz},
        {"tx_gain_dbi", s.link.tx_gain_dbi},
        {"rx_gain_dbi", s.link.rx_gain_dbi},
        {"noise_psd_dbm_hz", s.link.noise_psd_dbm_hz},
        {"total_tx_psd_dbm_hz", s.link.total_tx_psd_dbm_hz},
        {"link_loss_db", s.link.link_loss_db},
        {"psd_split", "equal"}}},
      {"numerology_set", s.numerology_set},
      {"minislot_set", s.minislot_set},
      {"min_qoe_vector", s.min_qoe_vector},
      {"peak_factor", s.peak_factor},
      {"fov_mean", s.fov_mean},
      {"fov_variance", s.fov_variance},
      {"fov_low", s.fov_low},
      {"fov_high", s.fov_high},
      {"qoe_a", s.qoe_a},
      {"qoe_b", s.qoe_b},
      {"bt_coverage_deg2", s.bt_coverage_deg2},
      {"et_coverage_deg2", s.et_coverage_deg2},
      {"qoe_log_base", s.qoe_log_base},
      {"rate_normalization", NormalizationName(s.rate_normalization)},
      {"max_bwps_per_tier", s.max_bwps_per_tier},
      {"rng_seed", s.rng_seed},
  };
}

ScenarioConfig ScenarioFromJson(const json& j) {
  const std::string w = "scenario";
  CheckKeys(j, {"n_ues", "cell_radius_m", "min_distance_m", "grid", "link", "numerology_set",
                "minislot_set", "min_qoe_vector", "peak_factor", "fov_mean", "fov_variance",
                "fov_low", "fov_high", "qoe_a", "qoe_b", "bt_coverage_deg2", "et_coverage_deg2",
                "qoe_log_base", "rate_normalization", "max_bwps_per_tier", "rng_seed"},
            w);
  ScenarioConfig s;
  Get(j, "n_ues", s.n_ues, w);
  Get(j, "cell_radius_m", s.cell_radius_m, w);
  Get(j, "min_distance_m", s.min_distance_m, w);
  if (const auto it = j.find("grid"); it != j.end()) {
    const std::string g = w + ".grid";
    CheckKeys(*it, {"mu_min", "mu_max", "frame_duration_ms", "system_bandwidth_khz"}, g);
    Get(*it, "mu_min", s.grid.mu_min, g);
    Get(*it, "mu_max", s.grid.mu_max, g);
    Get(*it, "frame_duration_ms", s.grid.frame_duration_ms, g);
    Get(*it, "system_bandwidth_khz", s.grid.system_bandwidth_khz, g);
  }
  if (const auto it = j.find("link"); it != j.end()) {
    const std::string l = w + ".link";
    CheckKeys(*it, {"carrier_frequency_hz", "tx_gain_dbi", "rx_gain_dbi", "noise_psd_dbm_hz",
                    "total_tx_psd_dbm_hz", "link_loss_db", "psd_split"},
              l);
    Get(*it, "carrier_frequency_hz", s.link.carrier_frequency_hz, l);
    Get(*it, "tx_gain_dbi", s.link.tx_gain_dbi, l);
    Get(*it, "rx_gain_dbi", s.link.rx_gain_dbi, l);
    Get(*it, "noise_psd_dbm_hz", s.link.noise_psd_dbm_hz, l);
    Get(*it, "total_tx_psd_dbm_hz", s.link.total_tx_psd_dbm_hz, l);
    Get(*it, "link_loss_db", s.link.link_loss_db, l);
    std::string split = "equal";
    Get(*it, "psd_split", split, l);
    if (split != "equal") throw ConfigError("link.psd_split must be 'equal'");
  }
  Get(j, "numerology_set", s.numerology_set, w);
  Get(j, "minislot_set", s.minislot_set, w);
  Get(j, "min_qoe_vector", s.min_qoe_vector, w);
  Get(j, "peak_factor", s.peak_factor, w);
  Get(j, "fov_mean", s.fov_mean, w);
  Get(j, "fov_variance", s.fov_variance, w);
  Get(j, "fov_low", s.fov_low, w);
  Get(j, "fov_high", s.fov_high, w);
  Get(j, "qoe_a", s.qoe_a, w);
  Get(j, "qoe_b", s.qoe_b, w);
  Get(j, "bt_coverage_deg2", s.bt_coverage_deg2, w);
  Get(j, "et_coverage_deg2", s.et_coverage_deg2, w);
  Get(j, "qoe_log_base", s.qoe_log_base, w);
  std::string norm = NormalizationName(s.rate_normalization);
  Get(j, "rate_normalization", norm, w);
  s.rate_normalization = NormalizationFromName(norm);
  Get(j, "max_bwps_per_tier", s.max_bwps_per_tier, w);
  Get(j, "rng_seed", s.rng_seed, w);
  return s;
}

json RewardToJson(const RewardParams& r) {
  return {{"weight", r.weight},
          {"time_penalty", r.time_penalty},
          {"terminal_bonus", r.terminal_bonus},
          {"violation_penalty", r.violation_penalty}};
}

RewardParams RewardFromJson(const json& j) {
  const std::string w = "reward";
  CheckKeys(j, {"weight", "time_penalty", "terminal_bonus", "violation_penalty"}, w);
  RewardParams r;
  Get(j, "weight", r.weight, w);
  Get(j, "time_penalty", r.time_penalty, w);
  Get(j, "terminal_bonus", r.terminal_bonus, w);
  Get(j, "violation_penalty", r.violation_penalty, w);
  return r;
}

json TrainToJson(const TrainConfig& t) {
  return {{"episodes", t.episodes},
          {"max_steps", t.max_steps},
          {"learning_rate", t.learning_rate},
          {"discount", t.discount},
          {"batch_size", t.batch_size},
          {"replay_capacity", t.replay_capacity},
          {"target_sync_interval", t.target_sync_interval},
          {"epsilon_start", t.epsilon_start},
          {"epsilon_end", t.epsilon_end},
          {"epsilon_decay_fraction", t.epsilon_decay_fraction},
          {"grad_clip_norm", t.grad_clip_norm},
          {"adam_beta1", t.adam_beta1},
          {"adam_beta2", t.adam_beta2},
          {"adam_epsilon", t.adam_epsilon},
          {"reward_scale", t.reward_scale},
          {"train_every", t.train_every},
          {"conv_layers", ConvToJson(t.conv_layers)},
          {"dense_layers", t.dense_layers},
          {"seed", t.seed}};
}

TrainConfig TrainFromJson(const json& j) {
  const std::string w = "train";
  CheckKeys(j, {"episodes", "max_steps", "learning_rate", "discount", "batch_size",
                "replay_capacity", "target_sync_interval", "epsilon_start", "epsilon_end",
                "epsilon_decay_fraction", "grad_clip_norm", "adam_beta1", "adam_beta2",
                "adam_epsilon", "reward_scale", "train_every", "conv_layers", "dense_layers",
                "seed"},
            w);
  TrainConfig t;
  Get(j, "episodes", t.episodes, w);
  Get(j, "max_steps", t.max_steps, w);
  Get(j, "learning_rate", t.learning_rate, w);
  Get(j, "discount", t.discount, w);
  Get(j, "batch_size", t.batch_size, w);
  Get(j, "replay_capacity", t.replay_capacity, w);
  Get(j, "target_sync_interval", t.target_sync_interval, w);
  Get(j, "epsilon_start", t.epsilon_start, w);
  Get(j, "epsilon_end", t.epsilon_end, w);
  Get(j, "epsilon_decay_fraction", t.epsilon_decay_fraction, w);
  Get(j, "grad_clip_norm", t.grad_clip_norm, w);
  Get(j, "adam_beta1", t.adam_beta1, w);
  Get(j, "adam_beta2", t.adam_beta2, w);
  Get(j, "adam_epsilon", t.adam_epsilon, w);
  Get(j, "reward_scale", t.reward_scale, w);
  Get(j, "train_every", t.train_every, w);
  if (const auto it = j.find("conv_layers"); it != j.end()) {
    t.conv_layers = ConvFromJson(*it, w + ".conv_layers");
  }
  Get(j, "dense_layers", t.dense_layers, w);
  Get(j, "seed", t.seed, w);
  return t;
}

// Replaces leaves of `node` whose path has an environment override.
void OverrideLeaves(json& node, const std::string& path, const EnvLookup& lookup) {
  if (node.is_object()) {
    for (auto& [key, child] : node.items()) {
      std::string upper = key;
      for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      OverrideLeaves(child, path.empty() ? upper : path + "_" + upper, lookup);
    }
    return;
  }
  const char* raw = lookup(std::string(kEnvPrefix) + path);
  if (raw == nullptr) return;
  json parsed = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  node = parsed.is_discarded() ? json(std::string(raw)) : parsed;
}

}  // namespace

void ValidateExperimentConfig(const ExperimentConfig& c) {
  ValidateScenarioConfig(c.scenario);
  ValidateRewardParams(c.reward);
  ValidateTrainConfig(c.train);
  if (c.n_eval_trials < 1) throw ConfigError("n_eval_trials must be at least 1");
  if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

json ToJson(const ExperimentConfig& c) {
  return {{"scenario", ScenarioToJson(c.scenario)},
          {"reward", RewardToJson(c.reward)},
          {"train", TrainToJson(c.train)},
          {"n_eval_trials", c.n_eval_trials},
          {"output_dir", c.output_dir}};
}

json ToJson(const QNetworkConfig& c) {
  return {{"in_channels", c.in_channels},
          {"in_height", c.in_height},
          {"in_width", c.in_width},
          {"aux_input_dim", c.aux_input_dim},
          {"conv_layers", ConvToJson(c.conv_layers)},
          {"dense_layers", c.dense_layers},
          {"output_dim", c.output_dim},
          {"activation", c.activation == Activation::kRelu ? "relu" : "identity"}};
}

QNetworkConfig NetworkConfigFromJson(const json& j) {
  const std::string w = "network";
  CheckKeys(j, {"in_channels", "in_height", "in_width", "aux_input_dim", "conv_layers",
                "dense_layers", "output_dim", "activation"},
            w);
  QNetworkConfig c;
  Get(j, "in_channels", c.in_channels, w);
  Get(j, "in_height", c.in_height, w);
  Get(j, "in_width", c.in_width, w);
  Get(j, "aux_input_dim", c.aux_input_dim, w);
  if (const auto it = j.find("conv_layers"); it != j.end()) {
    c.conv_layers = ConvFromJson(*it, w + ".conv_layers");
  }
  Get(j, "dense_layers", c.dense_layers, w);
  Get(j, "output_dim", c.output_dim, w);
  std::string act = "relu";
  Get(j, "activation", act, w);
  if (act == "relu") {
    c.activation = Activation::kRelu;
  } else if (act == "identity") {
    c.activation = Activation::kIdentity;
  } else {
    throw ConfigError("network.activation must be relu or identity");
  }
  return c;
}

ExperimentConfig ExperimentConfigFromJson(const json& j) {
  CheckKeys(j, {"scenario", "reward", "train", "n_eval_trials", "output_dir"}, "config");
  ExperimentConfig c;
  if (const auto it = j.find("scenario"); it != j.end()) c.scenario = ScenarioFromJson(*it);
  if (const auto it = j.find("reward"); it != j.end()) c.reward = RewardFromJson(*it);
  if (const auto it = j.find("train"); it != j.end()) c.train = TrainFromJson(*it);
  Get(j, "n_eval_trials", c.n_eval_trials, "config");
  Get(j, "output_dir", c.output_dir, "config");
  return c;
}

ExperimentConfig ParseExperimentConfig(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ConfigError("configuration is not valid JSON");
  return ExperimentConfigFromJson(j);
}

std::string SerializeExperimentConfig(const ExperimentConfig& c) {
  return ToJson(c).dump(2) + "\n";
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseExperimentConfig(buf.str());
}

ExperimentConfig ApplyEnvOverrides(const ExperimentConfig& c, const EnvLookup& lookup) {
  json j = ToJson(c);
  OverrideLeaves(j, "", lookup);
  return ExperimentConfigFromJson(j);
}

ExperimentConfig ApplyEnvOverrides(const ExperimentConfig& c) {
  return ApplyEnvOverrides(c, [](const std::string& name) { return std::getenv(name.c_str()); });
}

ExperimentConfig TinyExperimentConfig() {
  ExperimentConfig c;
  ScenarioConfig& s = c.scenario;
  s.n_ues = 2;
  s.grid.mu_min = 4;
  s.grid.mu_max = 5;
  s.grid.frame_duration_ms = 1.0 / 56.0;
  s.grid.system_bandwidth_khz = 11520.0;
  s.numerology_set = {4, 5};
  s.minislot_set = {2, 4};
  s.min_qoe_vector = {3.5, 3.5};
  s.max_bwps_per_tier = 2;
  c.train.episodes = 300;
  c.train.max_steps = 1000;
  c.train.train_every = 1;
  c.n_eval_trials = 20;
  return c;
}

}  // namespace xrsched
