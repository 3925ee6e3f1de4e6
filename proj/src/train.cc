// Copyright 2026 The floatrl Authors
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

#include "floatrl/train.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <utility>

#include "floatrl/csv.hpp"
#include "floatrl/env.hpp"
#include "floatrl/ppo.hpp"

namespace floatrl {
namespace {

// Stream tags keep network-init and update shuffles off the per-episode
// seed sequence mix64(seed, 0..episodes-1).
constexpr std::uint64_t kNetInitStream = 0x6e6574696e697400ull;
constexpr std::uint64_t kUpdateStream = 0x7570646174650000ull;

}  // namespace

const char* const kLearningCurveColumns[11] = {
    "update",       "episodes",  "mean_return", "normalized_reward",
    "success_rate", "mean_duration", "kl",      "clip_epsilon",
    "actor_lr",     "surrogate", "value_loss"};

double normalize_reward(double mean_return, double& running_max) {
  running_max = std::max(running_max, std::abs(mean_return));
  return running_max > 0.0 ? mean_return / running_max : 0.0;
}

Checkpoint initial_learner(const RunConfig& cfg, std::uint64_t seed) {
  Checkpoint ckpt;
  ckpt.mode = cfg.env.reward.mode;
  ckpt.seed = seed;
  ckpt.config_hash = config_hash(cfg);
  ckpt.clip_epsilon = cfg.ppo.clip_epsilon;

  Rng net_rng(mix64(seed, kNetInitStream));
  std::vector<int> actor_sizes{kStateDim};
  actor_sizes.insert(actor_sizes.end(), cfg.network.actor_hidden.begin(),
                     cfg.network.actor_hidden.end());
  actor_sizes.push_back(3);
  ckpt.policy.mean_net = Mlp::make(actor_sizes, net_rng, 0.01);
  ckpt.policy.log_std =
      Eigen::VectorXd::Constant(3, cfg.network.log_std_init);

  std::vector<int> critic_sizes{kStateDim};
  critic_sizes.insert(critic_sizes.end(), cfg.network.critic_hidden.begin(),
                      cfg.network.critic_hidden.end());
  critic_sizes.push_back(1);
  ckpt.critic = Mlp::make(critic_sizes, net_rng);

  ckpt.normalizer = RunningNormalizer(kStateDim);
  const int actor_params = static_cast<int>(ckpt.policy.parameters().size());
  ckpt.actor_adam = AdamState(actor_params, cfg.ppo.actor_lr);
  ckpt.critic_adam = AdamState(ckpt.critic.parameter_count(), cfg.ppo.critic_lr);
  return ckpt;
}

TrainResult train(const RunConfig& cfg, const TrainOptions& opts) {
  Environment env(cfg.env);
  Checkpoint learner = initial_learner(cfg, opts.seed);
  PpoTrainer trainer(learner.policy, learner.critic, cfg.ppo);

  const bool write_files = !opts.out_dir.empty();
  std::string checkpoint_path;
  std::optional<CsvWriter> curve;
  if (write_files) {
    std::filesystem::create_directories(opts.out_dir);
    save_config(opts.out_dir + "/effective_config.json", cfg);
    checkpoint_path = opts.out_dir + "/checkpoint.bin";
    save_checkpoint(checkpoint_path, learner);
    curve.emplace(opts.out_dir + "/learning_curve.csv",
                  std::vector<std::string>(kLearningCurveColumns,
                                           kLearningCurveColumns + 11));
  }

  TrainResult result;
  double running_max = 0.0;
  std::uint64_t episodes_done = 0;
  int updates_done = 0;
  const std::uint64_t max_episodes =
      static_cast<std::uint64_t>(cfg.ppo.max_episodes);

  while (episodes_done < max_episodes && updates_done < cfg.ppo.max_updates) {
    TrajectoryBatch batch;
    batch.episodes.reserve(cfg.ppo.batch_episodes);
    double return_sum = 0.0;
    double duration_sum = 0.0;
    int successes = 0;
    for (int i = 0; i < cfg.ppo.batch_episodes && episodes_done < max_episodes;
         ++i) {
      Rng episode_rng(mix64(opts.seed, episodes_done));
      EpisodeResult er = env.run_episode(trainer.policy(), trainer.critic(),
                                         learner.normalizer, RunMode::kTrain,
                                         episode_rng);
      return_sum += er.cumulative_reward;
      duration_sum += er.duration;
      successes += er.success ? 1 : 0;
      batch.episodes.push_back(std::move(er.episode));
      ++episodes_done;
    }
    const double batch_size = static_cast<double>(batch.episodes.size());
    if (batch.transition_count() == 0) continue;

    Rng update_rng(mix64(opts.seed ^ kUpdateStream, updates_done));
    const UpdateDiagnostics diag = trainer.update(batch, update_rng);
    ++updates_done;

    UpdateRecord rec;
    rec.update = updates_done;
    rec.episodes = episodes_done;
    rec.mean_return = return_sum / batch_size;
    rec.normalized_reward = normalize_reward(rec.mean_return, running_max);
    rec.success_rate = successes / batch_size;
    rec.mean_duration = duration_sum / batch_size;
    rec.kl = diag.kl;
    rec.clip_epsilon = diag.clip_epsilon;
    rec.actor_lr = diag.actor_lr;
    rec.surrogate = diag.surrogate;
    rec.value_loss = diag.value_loss;
    result.history.push_back(rec);

    learner.policy = trainer.policy();
    learner.critic = trainer.critic();
    learner.actor_adam = trainer.actor_adam();
    learner.critic_adam = trainer.critic_adam();
    learner.clip_epsilon = trainer.config().clip_epsilon;
    learner.episodes_done = episodes_done;
    learner.updates_done = static_cast<std::uint64_t>(updates_done);
    learner.reward_scale = running_max;
    if (write_files) {
      save_checkpoint(checkpoint_path, learner);
      curve->row({static_cast<double>(rec.update),
                  static_cast<double>(rec.episodes), rec.mean_return,
                  rec.normalized_reward, rec.success_rate, rec.mean_duration,
                  rec.kl, rec.clip_epsilon, rec.actor_lr, rec.surrogate,
                  rec.value_loss});
    }
    if (opts.progress_every > 0 && updates_done % opts.progress_every == 0) {
      std::fprintf(stderr,
                   "update %d: episodes %llu, mean return %.3f, "
                   "success %.2f, kl %.5f\n",
                   rec.update,
                   static_cast<unsigned long long>(rec.episodes),
                   rec.mean_return, rec.success_rate, rec.kl);
    }
  }

  result.checkpoint = std::move(learner);
  result.checkpoint_path = checkpoint_path;
  result.final_normalized_reward =
      result.history.empty() ? 0.0 : result.history.back().normalized_reward;
  return result;
}

}  // namespace floatrl
