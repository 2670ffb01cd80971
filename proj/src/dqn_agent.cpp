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

#include "xrsched/dqn_agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#if defined(__SSE__)
#include <xmmintrin.h>
#endif

#include "xrsched/errors.hpp"

namespace xrsched {
namespace {

// Sets flush-to-zero and denormals-are-zero on this thread for its lifetime.
class FlushSubnormals {
 public:
#if defined(__SSE__)
  FlushSubnormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
  ~FlushSubnormals() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#endif
};

}  // namespace

void ValidateTrainConfig(const TrainConfig& c) {
  if (c.episodes < 0) throw ConfigError("episodes must be non-negative");
  if (c.max_steps < 1) throw ConfigError("max_steps must be positive");
  if (!(c.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (c.discount < 0.0 || c.discount >= 1.0) throw ConfigError("discount must be in [0, 1)");
  if (c.batch_size < 1) throw ConfigError("batch_size must be positive");
  if (c.replay_capacity < c.batch_size) {
    throw ConfigError("replay_capacity must be at least batch_size");
  }
  if (c.target_sync_interval < 1) throw ConfigError("target_sync_interval must be positive");
  if (c.epsilon_start < 0.0 || c.epsilon_start > 1.0 || c.epsilon_end < 0.0 ||
      c.epsilon_end > 1.0) {
    throw ConfigError("epsilon bounds must be in [0, 1]");
  }
  if (c.epsilon_decay_fraction < 0.0 || c.epsilon_decay_fraction > 1.0) {
    throw ConfigError("epsilon_decay_fraction must be in [0, 1]");
  }
  if (!(c.grad_clip_norm > 0.0)) throw ConfigError("grad_clip_norm must be positive");
  if (c.adam_beta1 < 0.0 || c.adam_beta1 >= 1.0 || c.adam_beta2 < 0.0 || c.adam_beta2 >= 1.0) {
    throw ConfigError("adam betas must be in [0, 1)");
  }
  if (!(c.adam_epsilon > 0.0)) throw ConfigError("adam_epsilon must be positive");
  if (!(c.reward_scale > 0.0)) throw ConfigError("reward_scale must be positive");
  if (c.train_every < 1) throw ConfigError("train_every must be positive");
}

QNetworkConfig MakeNetworkConfig(const ScenarioConfig& scenario, const TrainConfig& train) {
  const GridDims dims = DeriveGrid(scenario.grid);
  QNetworkConfig net;
  net.in_channels = kGridChannels;
  net.in_height = dims.n_freq_units;
  net.in_width = dims.n_time_units;
  net.aux_input_dim = AuxFeatureCount(scenario.n_ues);
  net.conv_layers = train.conv_layers;
  net.dense_layers = train.dense_layers;
  net.output_dim = static_cast<int>(scenario.numerology_set.size() * scenario.minislot_set.size());
  return net;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
}

void ReplayBuffer::Push(Transition t) {
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(std::move(t));
}

std::vector<std::size_t> ReplayBuffer::SampleIndices(std::size_t count, Rng& rng) const {
  if (items_.empty()) throw ContractError("sampling from an empty replay buffer");
  std::vector<std::size_t> idx(count);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.UniformIndex(items_.size()));
  return idx;
}

int ActEpsilonGreedy(std::span<const float> values, const ActionMask& mask, double epsilon,
                     Rng& rng) {
  if (values.size() != mask.size()) throw ContractError("value and mask sizes differ");
  const auto allowed = static_cast<std::uint64_t>(std::count(mask.begin(), mask.end(), true));
  if (allowed == 0) throw ContractError("every action is masked");
  if (rng.Uniform() < epsilon) {
    std::uint64_t k = rng.UniformIndex(allowed);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i] && k-- == 0) return static_cast<int>(i);
    }
  }
  int best = -1;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] && (best < 0 || values[i] > values[static_cast<std::size_t>(best)])) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

double EpsilonAt(const TrainConfig& c, int episode) {
  const double span = c.epsilon_decay_fraction * c.episodes;
  if (span <= 0.0) return c.epsilon_end;
  const double frac = std::min(1.0, std::max(0.0, episode / span));
  return c.epsilon_start + (c.epsilon_end - c.epsilon_start) * frac;
}

double TdTarget(double reward, bool done, double discount, std::span<const float> next_values,
                const ActionMask& next_mask) {
  if (done) return reward;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < next_mask.size(); ++i) {
    if (next_mask[i]) best = std::max(best, static_cast<double>(next_values[i]));
  }
  if (!std::isfinite(best)) return reward;
  return reward + discount * best;
}

GradientCheckResult GradientCheck(const QNetworkConfig& config, std::span<const double> params,
                                  const TdBatch<double>& batch, int n_samples, double h,
                                  Rng& rng, double kink_margin) {
  QNetwork<double> net(config);
  QNetwork<double>::Workspace ws;
  std::vector<double> grad(net.num_params(), 0.0);
  TdLoss<double>(net, params, batch, ws, grad);
  const bool relu = config.activation == Activation::kRelu;
  const std::vector<double> base = net.HiddenPreActivations(ws);

  std::vector<std::size_t> picks(net.num_params());
  std::iota(picks.begin(), picks.end(), std::size_t{0});
  if (n_samples >= 0 && static_cast<std::size_t>(n_samples) < picks.size()) {
    // Partial Fisher-Yates for distinct indices.
    for (std::size_t i = 0; i < static_cast<std::size_t>(n_samples); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.UniformIndex(picks.size() - i));
      std::swap(picks[i], picks[j]);
    }
    picks.resize(static_cast<std::size_t>(n_samples));
  }

  auto crosses_kink = [&](const std::vector<double>& moved) {
    for (std::size_t i = 0; i < base.size(); ++i) {
      if ((base[i] > 0.0) != (moved[i] > 0.0)) return true;
      if (std::abs(base[i]) < kink_margin && moved[i] != base[i]) return true;
    }
    return false;
  };

  GradientCheckResult result;
  std::vector<double> p(params.begin(), params.end());
  for (std::size_t idx : picks) {
    const double orig = p[idx];
    p[idx] = orig + h;
    const double plus = TdLoss<double>(net, p, batch, ws, {});
    const bool kink_plus = relu && crosses_kink(net.HiddenPreActivations(ws));
    p[idx] = orig - h;
    const double minus = TdLoss<double>(net, p, batch, ws, {});
    const bool kink_minus = relu && crosses_kink(net.HiddenPreActivations(ws));
    p[idx] = orig;
    if (kink_plus || kink_minus) {
      ++result.skipped_near_kink;
      continue;
    }
    const double numeric = (plus - minus) / (2.0 * h);
    const double analytic = grad[idx];
    const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-7});
    result.max_relative_error =
        std::max(result.max_relative_error, std::abs(numeric - analytic) / denom);
    ++result.checked;
  }
  return result;
}

DqnAgent::DqnAgent(QNetworkConfig net_config, TrainConfig train_config)
    : net_(std::move(net_config)), train_(std::move(train_config)) {
  ValidateTrainConfig(train_);
  Rng init = Rng::ForStream(train_.seed, StreamDomain::kNetworkInit, 0);
  const std::vector<float> initial = net_.InitParams(init);
  params_.assign(initial.begin(), initial.end());
  target_ = params_;
  grad_.assign(params_.size(), 0.0f);
  adam_.m.assign(params_.size(), 0.0f);
  adam_.v.assign(params_.size(), 0.0f);
}

void DqnAgent::SetParams(std::span<const float> params) {
  if (params.size() != net_.num_params()) {
    throw ConfigError("parameter vector has " + std::to_string(params.size()) +
                      " entries, network expects " + std::to_string(net_.num_params()));
  }
  params_.assign(params.begin(), params.end());
  target_ = params_;
}

NetInput<float> DqnAgent::BuildInput(std::span<const Observation* const> obs) const {
  NetInput<float> in;
  in.batch = static_cast<int>(obs.size());
  const std::size_t g = static_cast<std::size_t>(net_.grid_size());
  const std::size_t a = static_cast<std::size_t>(net_.config().aux_input_dim);
  in.grid.reserve(obs.size() * g);
  in.aux.reserve(obs.size() * a);
  for (const Observation* o : obs) {
    FeatureEncoding enc = ExpandObservation(*o);
    if (enc.grid.size() != g || enc.aux.size() != a) {
      throw ConfigError("observation does not match the network input shape");
    }
    in.grid.insert(in.grid.end(), enc.grid.begin(), enc.grid.end());
    in.aux.insert(in.aux.end(), enc.aux.begin(), enc.aux.end());
  }
  return in;
}

std::vector<float> DqnAgent::QValues(const Observation& obs) const {
  const Observation* one[] = {&obs};
  thread_local QNetwork<float>::Workspace ws;
  const auto& q = net_.Forward(params_, BuildInput(one), ws);
  return std::vector<float>(q.data(), q.data() + q.rows());
}

std::vector<float> DqnAgent::TargetQValues(const Observation& obs) const {
  const Observation* one[] = {&obs};
  thread_local QNetwork<float>::Workspace ws;
  const auto& q = net_.Forward(target_, BuildInput(one), ws);
  return std::vector<float>(q.data(), q.data() + q.rows());
}

int DqnAgent::Act(const Observation& obs, const ActionMask& mask, double epsilon,
                  Rng& rng) const {
  return ActEpsilonGreedy(QValues(obs), mask, epsilon, rng);
}

double DqnAgent::TrainStep(std::span<const Transition* const> batch) {
  const FlushSubnormals ftz;
  const std::size_t B = batch.size();
  std::vector<const Observation*> cur(B), nxt(B);
  for (std::size_t i = 0; i < B; ++i) {
    cur[i] = &batch[i]->state;
    nxt[i] = &batch[i]->next_state;
  }
  const auto& q_next = net_.Forward(target_, BuildInput(nxt), target_ws_);

  TdBatch<float> td;
  td.input = BuildInput(cur);
  td.actions.resize(B);
  td.targets.resize(B);
  const auto rows = static_cast<std::size_t>(q_next.rows());
  for (std::size_t i = 0; i < B; ++i) {
    const Transition& t = *batch[i];
    std::span<const float> next(q_next.data() + i * rows, rows);
    td.actions[i] = t.action;
    td.targets[i] = static_cast<float>(
        TdTarget(t.reward * train_.reward_scale, t.done, train_.discount, next, t.next_mask));
  }

  const double loss = TdLoss<float>(net_, params_, td, ws_, grad_);

  double sq = 0.0;
  for (float g : grad_) sq += static_cast<double>(g) * g;
  last_grad_norm_ = std::sqrt(sq);
  const float clip = last_grad_norm_ > train_.grad_clip_norm
                         ? static_cast<float>(train_.grad_clip_norm / last_grad_norm_)
                         : 1.0f;

  ++adam_.t;
  const float b1 = static_cast<float>(train_.adam_beta1);
  const float b2 = static_cast<float>(train_.adam_beta2);
  const double t = static_cast<double>(adam_.t);
  const float step = static_cast<float>(train_.learning_rate *
                                        std::sqrt(1.0 - std::pow(train_.adam_beta2, t)) /
                                        (1.0 - std::pow(train_.adam_beta1, t)));
  const float eps = static_cast<float>(train_.adam_epsilon);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const float g = grad_[i] * clip;
    adam_.m[i] = b1 * adam_.m[i] + (1.0f - b1) * g;
    adam_.v[i] = b2 * adam_.v[i] + (1.0f - b2) * g * g;
    params_[i] -= step * adam_.m[i] / (std::sqrt(adam_.v[i]) + eps);
    grad_[i] = 0.0f;
  }
  return loss;
}

TrainResult Train(const EnvFactory& make_env, const QNetworkConfig& net_config,
                  const TrainConfig& config, const EpisodeCallback& on_episode) {
  const FlushSubnormals ftz;
  DqnAgent agent(net_config, config);
  Rng policy = Rng::ForStream(config.seed, StreamDomain::kTrainPolicy, 0);
  Rng sampler = Rng::ForStream(config.seed, StreamDomain::kReplay, 0);
  ReplayBuffer replay(static_cast<std::size_t>(config.replay_capacity));
  TrainResult result;
  std::deque<double> window;
  double window_sum = 0.0;
  std::vector<const Transition*> batch(static_cast<std::size_t>(config.batch_size));

  for (int e = 0; e < config.episodes; ++e) {
    Environment env = make_env(e);
    const double epsilon = EpsilonAt(config, e);
    EpisodeMetrics m;
    m.episode = e;
    m.epsilon = epsilon;
    Observation obs = env.Observe();
    while (!env.done()) {
      const ActionMask mask = env.FeasibleActions();
      const int a = agent.Act(obs, mask, epsilon, policy);
      if (!mask[static_cast<std::size_t>(a)]) {
        ++result.masked_selections;
        throw InternalError("agent selected a masked action");
      }
      const StepResult r = env.Step(a);
      Transition t;
      t.state = std::move(obs);
      t.action = a;
      t.reward = r.reward;
      t.next_state = env.Observe();
      t.done = r.done;
      if (!r.done) t.next_mask = env.FeasibleActions();
      obs = t.next_state;
      replay.Push(std::move(t));
      m.total_reward += r.reward;
      ++m.steps;
      ++result.env_steps;

      if (replay.size() >= static_cast<std::size_t>(config.batch_size) &&
          result.env_steps % config.train_every == 0) {
        const auto idx = replay.SampleIndices(batch.size(), sampler);
        for (std::size_t i = 0; i < idx.size(); ++i) batch[i] = &replay.at(idx[i]);
        agent.TrainStep(batch);
        ++result.gradient_steps;
      }
      if (result.env_steps % config.target_sync_interval == 0) {
        agent.SyncTarget();
        ++result.target_syncs;
      }
    }
    m.served_pct = 100.0 * env.ServedCount() / env.scenario().n_ues();
    m.total_qoe = env.TotalQoe();
    window.push_back(m.total_reward);
    window_sum += m.total_reward;
    if (window.size() > static_cast<std::size_t>(kMovingAverageWindow)) {
      window_sum -= window.front();
      window.pop_front();
    }
    m.moving_avg_reward = window_sum / static_cast<double>(window.size());
    result.metrics.push_back(m);
    if (on_episode) on_episode(m);
  }
  result.params.assign(agent.params().begin(), agent.params().end());
  return result;
}

EpisodeOutcome RunGreedyEpisode(const DqnAgent& agent, Environment& env) {
  env.Reset();
  Rng unused(0);
  EpisodeOutcome out;
  while (!env.done()) {
    const int a = agent.Act(env.Observe(), env.FeasibleActions(), 0.0, unused);
    out.total_reward += env.Step(a).reward;
    ++out.steps;
  }
  out.plan = env.ToPlan();
  return out;
}

}  // namespace xrsched
