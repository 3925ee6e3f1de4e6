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

#ifndef FLOATRL_TRAIN_HPP_
#define FLOATRL_TRAIN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "floatrl/checkpoint.hpp"
#include "floatrl/config.hpp"

namespace floatrl {

struct TrainOptions {
  std::uint64_t seed = 0;
  // Destination for effective_config.json, learning_curve.csv, and
  // checkpoint.bin (rewritten after every update). Empty trains in memory.
  std::string out_dir;
  int progress_every = 0;  // stderr line every n updates; 0 silences
};

struct UpdateRecord {
  int update = 0;               // 1-based
  std::uint64_t episodes = 0;   // total episodes collected so far
  double mean_return = 0.0;     // batch mean cumulative reward
  double normalized_reward = 0.0;
  double success_rate = 0.0;    // fraction of batch episodes ending in success
  double mean_duration = 0.0;   // [s]
  double kl = 0.0;
  double clip_epsilon = 0.0;    // post-adaptation
  double actor_lr = 0.0;        // post-adaptation
  double surrogate = 0.0;
  double value_loss = 0.0;
};

struct TrainResult {
  std::vector<UpdateRecord> history;
  Checkpoint checkpoint;
  std::string checkpoint_path;  // empty when out_dir is empty
  double final_normalized_reward = 0.0;
};

// Full run: seeded network init, batched episode collection, updates with KL
// adaptation, per-update logging and checkpointing. Deterministic in
// (config, seed). Stops at the episode or update cap, whichever first.
TrainResult train(const RunConfig& cfg, const TrainOptions& opts);

// The learning-curve scale: each batch mean divided by the running max
// absolute batch mean, so curves from different reward definitions share
// [-1, 1] once past their peak magnitude.
double normalize_reward(double mean_return, double& running_max);

// Builds the learner that train() starts from: seeded actor and critic,
// unit-free normalizer, fresh optimizer moments.
Checkpoint initial_learner(const RunConfig& cfg, std::uint64_t seed);

extern const char* const kLearningCurveColumns[11];

}  // namespace floatrl

#endif  // FLOATRL_TRAIN_HPP_
