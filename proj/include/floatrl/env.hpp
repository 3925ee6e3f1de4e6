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

#ifndef FLOATRL_ENV_HPP_
#define FLOATRL_ENV_HPP_

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "floatrl/dynamics.hpp"
#include "floatrl/mpc.hpp"
#include "floatrl/neural.hpp"
#include "floatrl/ppo.hpp"
#include "floatrl/pwpf.hpp"
#include "floatrl/reward.hpp"
#include "floatrl/rng.hpp"

namespace floatrl {

struct EpisodeConfig {
  double control_dt = 0.1;        // [s]
  double train_time_limit = 60.0;  // [s]
  double test_time_limit = 100.0;  // [s]
  // All four must hold simultaneously; position strictly below, the rest
  // inclusive.
  double success_position = 0.05;               // [m]
  double success_speed = 0.1;                   // [m/s]
  double success_angle = 5.0 * kDegree;         // [rad]
  double success_rate = 1.0 * kDegree;          // [rad/s]
  // Initial-condition half-ranges about the target.
  double init_pos_x = 1.5;                      // [m]
  double init_pos_y = 1.0;                      // [m]
  double init_speed = 0.05;                     // [m/s] per component
  double init_rate = 2.0 * kDegree;             // [rad/s]
  // The room; leaving it ends the episode with a penalty on the final step.
  double room_half_x = 2.5;                     // [m]
  double room_half_y = 1.5;                     // [m]
  double bound_penalty = -100.0;
  PlatformState target;  // room center, zero attitude and rates

  static constexpr double kDegree = 0.017453292519943295;
};

bool success_check(const PlatformState& state, const PlatformState& target,
                   const EpisodeConfig& cfg);

struct DisturbanceEvent {
  double t = 0.0;  // [s]
  Disturbance impulse;
};

struct DisturbanceSchedule {
  std::vector<DisturbanceEvent> events;  // times strictly increasing
  double duration = 100.0;               // [s]

  // Four pushes at 20 s intervals: translational kicks of 0.15 m/s in
  // varied directions, one rotation-dominant and one mixed.
  static DisturbanceSchedule default_schedule();
};

struct EnvConfig {
  PlatformParams platform;
  ThrusterLayout thrusters = ThrusterLayout::box_default();
  PwpfParams pwpf;
  MpcConfig mpc;
  MpcWeights mpc_weights;
  RewardConfig reward;
  EpisodeConfig episode;
};

struct StepRecord {
  double t = 0.0;
  PlatformState state;          // before the step
  Eigen::Vector3d action;       // sampled, pre-clamp, normalized
  BodyWrench commanded;         // clamped action mapped to the wrench box
  BodyWrench realized;          // pulse-averaged over the control period
  Eigen::VectorXd nozzle_duty;  // per-nozzle on fraction this period
  RewardTerms terms;
  double reward = 0.0;  // terms total plus any boundary penalty
  bool success_now = false;
};

struct EpisodeResult {
  Episode episode;  // transitions for learning
  std::vector<StepRecord> records;
  PlatformState final_state;
  bool success = false;
  bool out_of_bounds = false;
  double cumulative_reward = 0.0;
  double duration = 0.0;  // [s]
};

enum class RunMode { kTrain, kTest };

// Owns the simulator chain (allocation, modulation, integration, reward,
// MPC reference) and runs complete episodes.
class Environment {
 public:
  explicit Environment(const EnvConfig& cfg);

  const EnvConfig& config() const { return cfg_; }
  const Eigen::Vector3d& wrench_scale() const { return wrench_scale_; }

  PlatformState sample_initial_state(Rng& rng) const;

  // Train mode samples actions and updates the normalizer; test mode takes
  // the mean action and leaves the normalizer frozen. Terminates on success,
  // the mode's time limit, or leaving the room.
  EpisodeResult run_episode(const GaussianPolicy& policy, const Mlp& critic,
                            RunningNormalizer& normalizer, RunMode mode,
                            Rng& rng);

  // Deterministic policy for a fixed duration with scheduled velocity/rate
  // impulses; success does not terminate. Starts at the target unless an
  // initial state is supplied.
  EpisodeResult run_disturbed(const GaussianPolicy& policy,
                              const RunningNormalizer& normalizer,
                              const DisturbanceSchedule& schedule,
                              const PlatformState* initial = nullptr);

 private:
  struct LoopSettings {
    RunMode mode = RunMode::kTest;
    bool stop_on_success = true;
    double time_limit = 60.0;
    const DisturbanceSchedule* schedule = nullptr;
    const Mlp* critic = nullptr;
    Rng* rng = nullptr;
    RunningNormalizer* normalizer_updates = nullptr;  // train mode only
  };

  EpisodeResult run_loop(const GaussianPolicy& policy,
                         const RunningNormalizer& normalizer,
                         const PlatformState& initial,
                         const LoopSettings& settings) const;

  EnvConfig cfg_;
  PairAllocator allocator_;
  Eigen::Vector3d wrench_scale_;
  std::optional<MpcController> mpc_;
};

}  // namespace floatrl

#endif  // FLOATRL_ENV_HPP_
