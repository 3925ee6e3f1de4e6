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

#ifndef FLOATRL_CHECKPOINT_HPP_
#define FLOATRL_CHECKPOINT_HPP_

#include <cstdint>
#include <string>

#include "floatrl/neural.hpp"
#include "floatrl/reward.hpp"

namespace floatrl {

// Complete learner state: everything needed to evaluate the policy or to
// verify that two training runs diverged nowhere. Fixed little-endian binary
// layout with a trailing FNV-1a checksum; load distinguishes truncation,
// corruption, and version mismatch.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  RewardMode mode = RewardMode::kMpcGuided;
  std::uint64_t seed = 0;
  std::uint64_t episodes_done = 0;
  std::uint64_t updates_done = 0;
  std::uint64_t config_hash = 0;
  GaussianPolicy policy;
  Mlp critic;
  RunningNormalizer normalizer{1};
  AdamState actor_adam;
  AdamState critic_adam;
  double clip_epsilon = 0.2;
  double reward_scale = 0.0;  // running max |batch mean reward|
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::string& bytes);

// Atomic: writes a sibling temp file, then renames over the target.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace floatrl

#endif  // FLOATRL_CHECKPOINT_HPP_
