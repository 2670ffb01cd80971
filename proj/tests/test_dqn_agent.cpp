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

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "xrsched/errors.hpp"
#include "xrsched/experiment.hpp"
#include "xrsched/experiment_config.hpp"

namespace xrsched {
namespace {

QNetworkConfig SmallConvNet() {
  QNetworkConfig c;
  c.in_channels = 3;
  c.in_height = 4;
  c.in_width = 8;
  c.aux_input_dim = 16;
  c.conv_layers = {{4, 3, 1}, {4, 3, 1}};
  c.dense_layers = {16};
  c.output_dim = 4;
  return c;
}

template <typename T>
NetInput<T> RandomInput(const QNetworkConfig& c, int batch, Rng& rng, double scale = 1.0) {
  NetInput<T> in;
  in.batch = batch;
  in.grid.resize(static_cast<std::size_t>(batch) * c.in_channels * c.in_height * c.in_width);
  in.aux.resize(static_cast<std::size_t>(batch) * c.aux_input_dim);
  for (auto& v : in.grid) v = static_cast<T>(rng.Uniform(-scale, scale));
  for (auto& v : in.aux) v = static_cast<T>(rng.Uniform(-scale, scale));
  return in;
}

TdBatch<double> RandomBatch(const QNetworkConfig& c, int batch, Rng& rng) {
  TdBatch<double> b;
  b.input = RandomInput<double>(c, batch, rng);
  for (int i = 0; i < batch; ++i) {
    b.actions.push_back(static_cast<int>(rng.UniformIndex(static_cast<std::uint64_t>(c.output_dim))));
    b.targets.push_back(rng.Uniform(-2.0, 2.0));
  }
  return b;
}

TEST(QNetwork, ParameterCountMatchesHandCount) {
  QNetwork<float> net(SmallConvNet());
  const std::size_t expected = (3 * 9 * 4 + 4) + (4 * 9 * 4 + 4) + ((4 * 32 + 16) * 16 + 16) +
                               (16 * 4 + 4);
  EXPECT_EQ(net.num_params(), expected);
}

TEST(QNetwork, ZeroFinalLayerGivesZeroValues) {
  QNetwork<float> net(SmallConvNet());
  Rng rng(1);
  std::vector<float> p = net.InitParams(rng);
  const auto& last = net.dense_geometry().back();
  std::fill(p.begin() + static_cast<long>(last.w_off), p.end(), 0.0f);
  QNetwork<float>::Workspace ws;
  const auto& q = net.Forward(p, RandomInput<float>(net.config(), 5, rng), ws);
  EXPECT_EQ(q.rows(), 4);
  EXPECT_EQ(q.cols(), 5);
  EXPECT_EQ(q.cwiseAbs().maxCoeff(), 0.0f);
}

TEST(QNetwork, DimensionMismatchIsConfigError) {
  QNetwork<float> net(SmallConvNet());
  Rng rng(1);
  const auto p = net.InitParams(rng);
  QNetwork<float>::Workspace ws;
  NetInput<float> bad = RandomInput<float>(net.config(), 2, rng);
  bad.aux.pop_back();
  EXPECT_THROW(net.Forward(p, bad, ws), ConfigError);
  std::vector<float> short_p(p.begin(), p.end() - 1);
  EXPECT_THROW(net.Forward(short_p, RandomInput<float>(net.config(), 2, rng), ws), ConfigError);
}

TEST(QNetwork, FiniteOutputsOnRandomInputs) {
  QNetworkConfig c = SmallConvNet();
  QNetwork<float> net(c);
  Rng rng(2);
  const auto p = net.InitParams(rng);
  QNetwork<float>::Workspace ws;
  for (int i = 0; i < 10000; ++i) {
    const auto& q = net.Forward(p, RandomInput<float>(c, 1, rng, 100.0), ws);
    ASSERT_TRUE(q.allFinite());
  }
}

TEST(QNetwork, BatchRowsAreIndependent) {
  QNetworkConfig c = SmallConvNet();
  QNetwork<double> net(c);
  Rng rng(3);
  const auto p = net.InitParams(rng);
  const NetInput<double> both = RandomInput<double>(c, 2, rng);
  NetInput<double> second;
  second.batch = 1;
  const std::size_t g = both.grid.size() / 2, a = both.aux.size() / 2;
  second.grid.assign(both.grid.begin() + static_cast<long>(g), both.grid.end());
  second.aux.assign(both.aux.begin() + static_cast<long>(a), both.aux.end());
  QNetwork<double>::Workspace w1, w2;
  const auto q_both = net.Forward(p, both, w1);
  const auto& q_one = net.Forward(p, second, w2);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(q_both(k, 1), q_one(k, 0), 1e-12);
}

TEST(Dqn, EpsilonGreedyExamples) {
  Rng rng(4);
  const std::vector<float> v{1, 3, 2};
  EXPECT_EQ(ActEpsilonGreedy(v, {true, true, true}, 0.0, rng), 1);
  EXPECT_EQ(ActEpsilonGreedy(std::vector<float>{5, 1, 2}, {false, true, true}, 0.0, rng), 2);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(ActEpsilonGreedy(v, {false, false, true}, 1.0, rng), 2);
  }
  EXPECT_EQ(ActEpsilonGreedy(std::vector<float>{2, 2, 2}, {true, true, true}, 0.0, rng), 0);
  EXPECT_THROW(ActEpsilonGreedy(v, {false, false, false}, 0.0, rng), ContractError);
}

TEST(Dqn, EpsilonGreedyExploresOnlyUnmaskedUniformly) {
  Rng rng(5);
  const std::vector<float> v{0, 9, 0, 0};
  const ActionMask m{true, false, true, true};
  std::vector<int> counts(4, 0);
  const int n = 30000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(ActEpsilonGreedy(v, m, 1.0, rng))];
  EXPECT_EQ(counts[1], 0);
  for (int k : {0, 2, 3}) EXPECT_NEAR(counts[static_cast<std::size_t>(k)] / double(n), 1.0 / 3, 0.02);
}

TEST(Dqn, TdTargets) {
  EXPECT_EQ(TdTarget(500.0, true, 0.99, std::vector<float>{7, 8}, {true, true}), 500.0);
  EXPECT_NEAR(TdTarget(1.0, false, 0.99, std::vector<float>{2, 1}, {true, true}), 2.98, 1e-12);
  EXPECT_NEAR(TdTarget(1.0, false, 0.99, std::vector<float>{9, 2}, {false, true}), 2.98, 1e-12);
}

TEST(Dqn, IdenticalBatchLossEqualsSingleError) {
  QNetworkConfig c = SmallConvNet();
  QNetwork<double> net(c);
  Rng rng(6);
  const auto p = net.InitParams(rng);
  TdBatch<double> one = RandomBatch(c, 1, rng);
  TdBatch<double> many;
  many.input.batch = 8;
  for (int i = 0; i < 8; ++i) {
    many.input.grid.insert(many.input.grid.end(), one.input.grid.begin(), one.input.grid.end());
    many.input.aux.insert(many.input.aux.end(), one.input.aux.begin(), one.input.aux.end());
    many.actions.push_back(one.actions[0]);
    many.targets.push_back(one.targets[0]);
  }
  QNetwork<double>::Workspace ws;
  const double q = net.Forward(p, one.input, ws)(one.actions[0], 0);
  const double err = q - one.targets[0];
  EXPECT_NEAR(TdLoss<double>(net, p, many, ws, {}), err * err, 1e-12);
  EXPECT_THROW(TdLoss<double>(net, p, TdBatch<double>{}, ws, {}), ContractError);
}

TEST(Dqn, GradientCheckLinearNetwork) {
  QNetworkConfig c;
  c.in_channels = 1;
  c.in_height = 3;
  c.in_width = 4;
  c.aux_input_dim = 5;
  c.conv_layers = {};
  c.dense_layers = {};
  c.output_dim = 3;
  c.activation = Activation::kIdentity;
  QNetwork<double> net(c);
  Rng rng(7);
  const auto p = net.InitParams(rng);
  const auto r = GradientCheck(c, p, RandomBatch(c, 6, rng), 1000, 1e-5, rng);
  EXPECT_EQ(r.checked, static_cast<int>(net.num_params()));
  EXPECT_LT(r.max_relative_error, 1e-8);
}

TEST(Dqn, GradientCheckSmallConvNet) {
  const QNetworkConfig c = SmallConvNet();
  QNetwork<double> net(c);
  Rng rng(8);
  const auto p = net.InitParams(rng);
  const auto start = std::chrono::steady_clock::now();
  const auto r = GradientCheck(c, p, RandomBatch(c, 4, rng), 400, 1e-5, rng);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_GE(r.checked, 200);
  EXPECT_LT(r.max_relative_error, 1e-4);
  EXPECT_LT(secs, 30.0);
}

TEST(Dqn, GradientOfIdentityConvNetMatchesDifferences) {
  QNetworkConfig c = SmallConvNet();
  c.activation = Activation::kIdentity;
  QNetwork<double> net(c);
  Rng rng(9);
  const auto p = net.InitParams(rng);
  const auto r = GradientCheck(c, p, RandomBatch(c, 3, rng), 300, 1e-5, rng);
  EXPECT_EQ(r.skipped_near_kink, 0);
  EXPECT_LT(r.max_relative_error, 1e-6);
}

Transition MakeTransition(int id) {
  Transition t;
  t.action = id;
  return t;
}

TEST(Replay, FifoEvictionAndCapacity) {
  ReplayBuffer rb(3);
  for (int i = 0; i < 5; ++i) {
    rb.Push(MakeTransition(i));
    EXPECT_LE(rb.size(), 3u);
  }
  EXPECT_EQ(rb.at(0).action, 2);
  EXPECT_EQ(rb.at(2).action, 4);
  EXPECT_THROW(ReplayBuffer(0), ConfigError);
  Rng rng(1);
  EXPECT_THROW(ReplayBuffer(2).SampleIndices(1, rng), ContractError);
}

TEST(Replay, SamplingIsUniform) {
  const int cap = 50;
  ReplayBuffer rb(cap);
  for (int i = 0; i < cap; ++i) rb.Push(MakeTransition(i));
  Rng rng(12);
  std::vector<int> counts(cap, 0);
  const int draws = 100000;
  for (std::size_t idx : rb.SampleIndices(draws, rng)) ++counts[idx];
  const double expected = static_cast<double>(draws) / cap;
  double chi2 = 0.0;
  for (int k : counts) chi2 += (k - expected) * (k - expected) / expected;
  // 0.999 quantile of chi-square with 49 degrees of freedom.
  EXPECT_LT(chi2, 85.35);
}

TEST(Dqn, EpsilonSchedule) {
  TrainConfig c;
  c.episodes = 100;
  EXPECT_DOUBLE_EQ(EpsilonAt(c, 0), 1.0);
  EXPECT_NEAR(EpsilonAt(c, 25), 0.525, 1e-12);
  EXPECT_NEAR(EpsilonAt(c, 50), 0.05, 1e-12);
  EXPECT_NEAR(EpsilonAt(c, 99), 0.05, 1e-12);
  for (int e = 0; e < 100; ++e) {
    EXPECT_GE(EpsilonAt(c, e), 0.05 - 1e-15);
    EXPECT_LE(EpsilonAt(c, e), 1.0);
    if (e > 0) EXPECT_LE(EpsilonAt(c, e), EpsilonAt(c, e - 1));
  }
  c.epsilon_decay_fraction = 0.0;
  EXPECT_DOUBLE_EQ(EpsilonAt(c, 0), 0.05);
}

TEST(Dqn, ConfigValidation) {
  TrainConfig c;
  c.replay_capacity = 8;
  c.batch_size = 32;
  EXPECT_THROW(ValidateTrainConfig(c), ConfigError);
  c = TrainConfig{};
  c.epsilon_end = 1.5;
  EXPECT_THROW(ValidateTrainConfig(c), ConfigError);
  EXPECT_NO_THROW(ValidateTrainConfig(TrainConfig{}));
}

TEST(Dqn, DefaultNetworkShape) {
  const QNetworkConfig c = MakeNetworkConfig(ScenarioConfig{}, TrainConfig{});
  EXPECT_EQ(c.output_dim, 9);
  EXPECT_EQ(c.in_height, 24);
  EXPECT_EQ(c.in_width, 56);
  EXPECT_EQ(c.aux_input_dim, 7 * 4 + 2);
}

ExperimentConfig QuickConfig(int episodes) {
  ExperimentConfig c = TinyExperimentConfig();
  c.train.episodes = episodes;
  c.train.conv_layers = {{4, 3, 1}};
  c.train.dense_layers = {16};
  c.train.target_sync_interval = 10;
  c.train.batch_size = 8;
  return c;
}

TEST(Dqn, TargetNetworkFrozenUntilSync) {
  const ExperimentConfig cfg = QuickConfig(1);
  DqnAgent agent(MakeNetworkConfig(cfg.scenario, cfg.train), cfg.train);
  Environment env = MakeTrainEnvFactory(cfg)(0);
  std::vector<Transition> ts;
  Rng rng(1);
  while (!env.done()) {
    Transition t;
    t.state = env.Observe();
    t.action = agent.Act(t.state, env.FeasibleActions(), 1.0, rng);
    const StepResult r = env.Step(t.action);
    t.reward = r.reward;
    t.done = r.done;
    t.next_state = env.Observe();
    if (!r.done) t.next_mask = env.FeasibleActions();
    ts.push_back(std::move(t));
  }
  std::vector<const Transition*> batch;
  for (const auto& t : ts) batch.push_back(&t);
  const std::vector<float> target0(agent.target_params().begin(), agent.target_params().end());
  agent.TrainStep(batch);
  agent.TrainStep(batch);
  EXPECT_TRUE(std::equal(target0.begin(), target0.end(), agent.target_params().begin()));
  EXPECT_FALSE(std::equal(target0.begin(), target0.end(), agent.params().begin()));
  agent.SyncTarget();
  EXPECT_TRUE(std::equal(agent.params().begin(), agent.params().end(),
                         agent.target_params().begin()));
}

TEST(Dqn, ZeroEpisodesLeavesInitialParameters) {
  const ExperimentConfig cfg = QuickConfig(0);
  const auto net = MakeNetworkConfig(cfg.scenario, cfg.train);
  const TrainResult r = Train(MakeTrainEnvFactory(cfg), net, cfg.train);
  EXPECT_TRUE(r.metrics.empty());
  DqnAgent fresh(net, cfg.train);
  EXPECT_TRUE(std::equal(r.params.begin(), r.params.end(), fresh.params().begin()));
}

TEST(Dqn, TrainingIsDeterministicAndNeverSelectsMaskedActions) {
  const ExperimentConfig cfg = QuickConfig(30);
  const auto net = MakeNetworkConfig(cfg.scenario, cfg.train);
  const TrainResult a = Train(MakeTrainEnvFactory(cfg), net, cfg.train);
  const TrainResult b = Train(MakeTrainEnvFactory(cfg), net, cfg.train);
  ASSERT_EQ(a.metrics.size(), 30u);
  EXPECT_EQ(TrainingCsv(a.metrics), TrainingCsv(b.metrics));
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.masked_selections, 0);
  EXPECT_EQ(a.target_syncs, a.env_steps / cfg.train.target_sync_interval);
  std::int64_t expected_updates = 0;
  for (std::int64_t k = cfg.train.batch_size; k <= a.env_steps; ++k) {
    expected_updates += k % cfg.train.train_every == 0;
  }
  EXPECT_EQ(a.gradient_steps, expected_updates);
  for (const auto& m : a.metrics) {
    EXPECT_GE(m.served_pct, 0.0);
    EXPECT_LE(m.served_pct, 100.0);
    EXPECT_LE(m.steps, cfg.train.max_steps);
  }
}

}  // namespace
}  // namespace xrsched
