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

#ifndef FLOATRL_CONFIG_HPP_
#define FLOATRL_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "floatrl/env.hpp"
#include "floatrl/ppo.hpp"

namespace floatrl {

struct NetworkConfig {
  std::vector<int> actor_hidden{128, 64};
  std::vector<int> critic_hidden{128, 64, 8};
  double log_std_init = -0.6931471805599453;  // log(0.5)
};

// Complete description of one training or evaluation run.
struct RunConfig {
  EnvConfig env;
  PpoConfig ppo;
  NetworkConfig network;
};

RunConfig default_config();

// JSON round trip. Sections and keys may be omitted (defaults fill in);
// unknown keys are rejected so typos fail loudly. All angles are radians.
RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& cfg);

RunConfig load_config(const std::string& path);
void save_config(const std::string& path, const RunConfig& cfg);

// FNV-1a over the canonical serialization; stable across runs and platforms.
std::uint64_t config_hash(const RunConfig& cfg);

const char* reward_mode_name(RewardMode mode);
RewardMode reward_mode_from_name(const std::string& name);

// JSON round trip for impulse schedules:
//   {"duration": 100.0, "events": [{"t": 20.0, "dvx": 0.15, "dvy": 0.0,
//    "domega": 0.0}, ...]}
// Event fields default to zero; times must be strictly increasing and inside
// the duration.
DisturbanceSchedule parse_schedule(const std::string& text);
std::string serialize_schedule(const DisturbanceSchedule& schedule);
DisturbanceSchedule load_schedule(const std::string& path);
void save_schedule(const std::string& path, const DisturbanceSchedule& schedule);

}  // namespace floatrl

#endif  // FLOATRL_CONFIG_HPP_
