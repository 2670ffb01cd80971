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

#ifndef XRSCHED_DQN_AGENT_HPP_
#define XRSCHED_DQN_AGENT_HPP_

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "xrsched/env_mdp.hpp"
#include "xrsched/q_network.hpp"
#include "xrsched/rng.hpp"

namespace xrsched {

struct TrainConfig {
  int episodes = 510;
  int max_steps = 1000;
  double learning_rate = 1e-3;
  double discount = 0.99;
  int batch_size = 32;
  int replay_capacity = 100'000;
  int target_sync_interval = 100;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.5;
  double grad_clip_norm = 10.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  // Multiplies rewards inside the learner only; reported rewards are raw.
  double reward_scale = 0.01;
  // Environment steps between gradient updates.
  int train_every = 4;
  std::vector<ConvLayerSpec> conv_layers{{16, 3, 1}, {32, 3, 1}};
  std::vector<int> dense_layers{128};
  std::uint64_t seed = 7;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

void ValidateTrainConfig(const TrainConfig& config);

QNetworkConfig MakeNetworkConfig(const ScenarioConfig& scenario, const TrainConfig& train);

struct Transition {
  Observation state;
  int action = 0;
  double reward = 0.0;
  Observation next_state;
  bool done = false;
  ActionMask next_mask;
};

// Fixed-capacity FIFO; once full, each push evicts the oldest transition.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void Push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return items_.at(i); }
  // Uniform with replacement.
  std::vector<std::size_t> SampleIndices(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::deque<Transition> items_;
};

// Uniform over unmasked actions with probability epsilon, otherwise the
// masked argmax (lowest index on ties). Throws ContractError if all masked.
int ActEpsilonGreedy(std::span<const float> values, const ActionMask& mask,
                     double epsilon, Rng& rng);

// Linear from epsilon_start to epsilon_end over the first
// decay_fraction * episodes, then constant.
double EpsilonAt(const TrainConfig& config, int episode);

// TD regression batch: inputs, chosen actions and fixed targets.
template <typename T>
struct TdBatch {
  NetInput<T> input;
  std::vector<int> actions;
  std::vector<T> targets;
};

// y = r for terminal transitions, else r + gamma * max over the next-state
// mask of the target values.
double TdTarget(double reward, bool done, double discount,
                std::span<const float> next_values, const ActionMask& next_mask);

// Mean of (Q(s, a) - y)^2 over the batch. When `grad` is non-empty the
// gradient is accumulated into it.
template <typename T>
double TdLoss(const QNetwork<T>& net, std::span<const T> params, const TdBatch<T>& batch,
              typename QNetwork<T>::Workspace& ws, std::span<T> grad) {
  const int B = batch.input.batch;
  if (B < 1) throw ContractError("empty training batch");
  const auto& q = net.Forward(params, batch.input, ws);
  typename QNetwork<T>::Mat d_out = QNetwork<T>::Mat::Zero(q.rows(), q.cols());
  double loss = 0.0;
  for (int b = 0; b < B; ++b) {
    const int a = batch.actions[static_cast<std::size_t>(b)];
    const double err = static_cast<double>(q(a, b)) - static_cast<double>(batch.targets[static_cast<std::size_t>(b)]);
    loss += err * err;
    d_out(a, b) = static_cast<T>(2.0 * err / B);
  }
  if (!grad.empty()) net.Backward(params, ws, d_out, grad);
  return loss / B;
}

struct GradientCheckResult {
  double max_relative_error = 0.0;
  int checked = 0;
  int skipped_near_kink = 0;
};

// Central differences with step h on `n_samples` randomly chosen parameters.
// A parameter is skipped when either perturbation flips the sign of any
// rectifier pre-activation, or moves one that started within kink_margin of 0.
GradientCheckResult GradientCheck(const QNetworkConfig& config, std::span<const double> params,
                                  const TdBatch<double>& batch, int n_samples, double h,
                                  Rng& rng, double kink_margin = 1e-4);

struct AdamState {
  AlignedVector<float> m;
  AlignedVector<float> v;
  std::int64_t t = 0;
};

class DqnAgent {
 public:
  DqnAgent(QNetworkConfig net_config, TrainConfig train_config);

  const QNetwork<float>& network() const { return net_; }
  const TrainConfig& train_config() const { return train_; }
  std::span<const float> params() const { return params_; }
  std::span<const float> target_params() const { return target_; }
  void SetParams(std::span<const float> params);
  void SyncTarget() { target_ = params_; }

  // Thread-safe: each thread keeps its own workspace.
  std::vector<float> QValues(const Observation& obs) const;
  std::vector<float> TargetQValues(const Observation& obs) const;
  int Act(const Observation& obs, const ActionMask& mask, double epsilon, Rng& rng) const;

  // One Adam step on the TD loss; returns the pre-update loss.
  double TrainStep(std::span<const Transition* const> batch);
  double last_grad_norm() const { return last_grad_norm_; }

 private:
  NetInput<float> BuildInput(std::span<const Observation* const> obs) const;

  QNetwork<float> net_;
  TrainConfig train_;
  AlignedVector<float> params_;
  AlignedVector<float> target_;
  AlignedVector<float> grad_;
  AdamState adam_;
  QNetwork<float>::Workspace ws_;
  QNetwork<float>::Workspace target_ws_;
  double last_grad_norm_ = 0.0;
};

struct EpisodeMetrics {
  int episode = 0;
  double total_reward = 0.0;
  double moving_avg_reward = 0.0;
  int steps = 0;
  double served_pct = 0.0;
  double total_qoe = 0.0;
  double epsilon = 0.0;
};

inline constexpr int kMovingAverageWindow = 50;

struct TrainResult {
  std::vector<float> params;
  std::vector<EpisodeMetrics> metrics;
  std::int64_t env_steps = 0;
  std::int64_t gradient_steps = 0;
  std::int64_t target_syncs = 0;
  // Selections of masked actions; stays zero for a sound mask.
  std::int64_t masked_selections = 0;
};

// Builds the environment for a given episode index.
using EnvFactory = std::function<Environment(int episode)>;

using EpisodeCallback = std::function<void(const EpisodeMetrics&)>;

TrainResult Train(const EnvFactory& make_env, const QNetworkConfig& net_config,
                  const TrainConfig& config, const EpisodeCallback& on_episode = {});

struct EpisodeOutcome {
  double total_reward = 0.0;
  int steps = 0;
  AllocationPlan plan;
};

// Runs the epsilon = 0 policy on a freshly reset environment.
EpisodeOutcome RunGreedyEpisode(const DqnAgent& agent, Environment& env);

}  // namespace xrsched

#endif  // XRSCHED_DQN_AGENT_HPP_
