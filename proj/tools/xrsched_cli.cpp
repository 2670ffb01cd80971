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

// Command-line driver: train, eval, baseline and oracle runs.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "xrsched/errors.hpp"
#include "xrsched/experiment.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<int> trials;
  std::optional<std::string> out;
  int jobs = 1;
  std::string methods;
  std::string checkpoint;
  bool tiny = false;
  int progress = 0;
};

xrsched::ExperimentConfig ResolveConfig(const Flags& f) {
  xrsched::ExperimentConfig c =
      f.tiny ? xrsched::TinyExperimentConfig() : xrsched::ExperimentConfig{};
  if (!f.config_path.empty()) c = xrsched::LoadExperimentConfig(f.config_path);
  c = xrsched::ApplyEnvOverrides(c);
  if (f.seed) {
    c.train.seed = *f.seed;
    c.scenario.rng_seed = *f.seed;
  }
  if (f.episodes) c.train.episodes = *f.episodes;
  if (f.trials) c.n_eval_trials = *f.trials;
  if (f.out) c.output_dir = *f.out;
  xrsched::ValidateExperimentConfig(c);
  return c;
}

std::string DefaultCheckpoint(const Flags& f, const xrsched::ExperimentConfig& c) {
  return f.checkpoint.empty() ? c.output_dir + "/checkpoint.bin" : f.checkpoint;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-frequency resource allocation for two-tier 360-degree video"};
  app.require_subcommand(1);
  Flags f;
  auto add_common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config_path, "JSON experiment config");
    sub->add_option("--seed", f.seed, "Seed for training and scenario streams");
    sub->add_option("--episodes", f.episodes, "Training episodes");
    sub->add_option("--trials", f.trials, "Evaluation trials");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--jobs", f.jobs, "Evaluation threads")->check(CLI::PositiveNumber);
    sub->add_flag("--tiny", f.tiny, "Start from the tiny exhaustive-search profile");
  };
  auto* train = app.add_subcommand("train", "Train the agent; writes training.csv and checkpoint.bin");
  auto* eval = app.add_subcommand("eval", "Evaluate methods on fresh trials; writes eval.csv");
  auto* baseline = app.add_subcommand("baseline", "Evaluate the fixed-split baselines only");
  auto* oracle = app.add_subcommand("oracle", "Exhaustive search on tiny instances; writes oracle.csv");
  auto* dump = app.add_subcommand("config", "Print the resolved configuration");
  for (auto* sub : {train, eval, baseline, oracle, dump}) add_common(sub);
  eval->add_option("--methods", f.methods, "Comma-separated: dqn,equal_bandwidth,equal_time_frequency,oracle")
      ->default_val("dqn,equal_bandwidth,equal_time_frequency");
  baseline->add_option("--methods", f.methods, "Comma-separated baseline methods")
      ->default_val("equal_bandwidth,equal_time_frequency");
  train->add_option("--progress", f.progress, "Log every N episodes to stderr (0 = quiet)");
  for (auto* sub : {eval, oracle}) {
    sub->add_option("--checkpoint", f.checkpoint, "Checkpoint (default <out>/checkpoint.bin)");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const xrsched::ExperimentConfig c = ResolveConfig(f);
    if (dump->parsed()) {
      std::cout << xrsched::SerializeExperimentConfig(c);
    } else if (train->parsed()) {
      const auto r = xrsched::RunTrain(c, [&f](const xrsched::EpisodeMetrics& m) {
        if (f.progress > 0 && (m.episode + 1) % f.progress == 0) {
          std::fprintf(stderr, "episode %d reward %.3f avg %.3f served %.1f%% eps %.3f\n",
                       m.episode + 1, m.total_reward, m.moving_avg_reward, m.served_pct,
                       m.epsilon);
        }
      });
      const auto& last = r.metrics.empty() ? xrsched::EpisodeMetrics{} : r.metrics.back();
      std::printf("trained %d episodes, %lld env steps, final moving-average reward %.4f\n",
                  c.train.episodes, static_cast<long long>(r.env_steps), last.moving_avg_reward);
    } else if (eval->parsed() || baseline->parsed()) {
      const auto methods = xrsched::ParseMethods(f.methods);
      if (baseline->parsed()) {
        for (const auto& m : methods) {
          if (m == xrsched::kMethodDqn || m == xrsched::kMethodOracle) {
            throw xrsched::ConfigError("baseline accepts only baseline methods");
          }
        }
      }
      const auto rows = xrsched::RunEval(c, DefaultCheckpoint(f, c), methods, f.jobs);
      std::printf("wrote %zu rows to %s/eval.csv\n", rows.size(), c.output_dir.c_str());
    } else if (oracle->parsed()) {
      const auto rows = xrsched::RunOracle(c, f.checkpoint, f.jobs);
      std::printf("wrote %zu rows to %s/oracle.csv\n", rows.size(), c.output_dir.c_str());
    }
  } catch (const xrsched::SizeError& e) {
    std::fprintf(stderr, "size error: %s\n", e.what());
    return 3;
  } catch (const xrsched::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
