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

#ifndef FLOATRL_REWARD_HPP_
#define FLOATRL_REWARD_HPP_

#include <vector>

#include <Eigen/Dense>

#include "floatrl/dynamics.hpp"

namespace floatrl {

enum class RewardMode { kMpcGuided, kPpoOnly };

struct RewardConfig {
  // Weight on the acceleration-tracking error (v̇x, v̇y, ω̇ channels).
  Eigen::Vector3d deriv_weight{1.0, 10.0, 5.0};
  // Weight on the normalized action.
  Eigen::Vector3d effort_weight{10.0, 10.0, 10.0};
  double psi1 = 100.0;  // rotation-error bonus scale
  double psi2 = 10.0;   // position-error bonus scale
  // Sharpness schedule k(t) = k0 + k_rate * t narrows the bonuses over the
  // episode.
  double k0 = 1.0;
  double k_rate = 0.5;
  RewardMode mode = RewardMode::kMpcGuided;
};

struct StabilizationErrors {
  double sigma = 0.0;  // position error magnitude [m]
  double delta = 0.0;  // rotation error magnitude [rad]
};

StabilizationErrors stabilization_errors(const PlatformState& state,
                                         const PlatformState& target);

struct RewardTerms {
  double deriv_term = 0.0;   // -||achieved - reference||^2_M
  double effort_term = 0.0;  // -||action||^2_P
  double rotation_bonus = 0.0;
  double position_bonus = 0.0;

  double total() const {
    return deriv_term + effort_term + rotation_bonus + position_bonus;
  }
};

// The per-step reward: acceleration tracking against the reference, control
// effort in normalized action units, and two sigmoid stabilization bonuses
// sharpened by k(t). In ppo_only mode the caller passes a zero reference;
// the arithmetic is mode-independent.
RewardTerms reward_terms(const Eigen::Vector3d& achieved_deriv,
                         const Eigen::Vector3d& reference_deriv,
                         const Eigen::Vector3d& action,
                         const StabilizationErrors& errors, double t,
                         const RewardConfig& cfg);

double reward(const Eigen::Vector3d& achieved_deriv,
              const Eigen::Vector3d& reference_deriv,
              const Eigen::Vector3d& action, const StabilizationErrors& errors,
              double t, const RewardConfig& cfg);

// Diagnostic sweep of the two bonus terms over a time grid at fixed errors.
std::vector<double> terminal_bonus_profile(const StabilizationErrors& errors,
                                           const std::vector<double>& t_grid,
                                           const RewardConfig& cfg);

}  // namespace floatrl

#endif  // FLOATRL_REWARD_HPP_
