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

#include "floatrl/reward.hpp"

#include <cmath>

namespace floatrl {

StabilizationErrors stabilization_errors(const PlatformState& state,
                                         const PlatformState& target) {
  StabilizationErrors e;
  e.sigma = std::hypot(state.x - target.x, state.y - target.y);
  e.delta = std::abs(wrap_angle(state.theta - target.theta));
  return e;
}

RewardTerms reward_terms(const Eigen::Vector3d& achieved_deriv,
                         const Eigen::Vector3d& reference_deriv,
                         const Eigen::Vector3d& action,
                         const StabilizationErrors& errors, double t,
                         const RewardConfig& cfg) {
  const double k = cfg.k0 + cfg.k_rate * t;
  const Eigen::Array3d diff = (achieved_deriv - reference_deriv).array();
  RewardTerms out;
  out.deriv_term = -(cfg.deriv_weight.array() * diff.square()).sum();
  out.effort_term = -(cfg.effort_weight.array() * action.array().square()).sum();
  out.rotation_bonus = cfg.psi1 / (1.0 + std::exp(k * errors.delta));
  out.position_bonus = cfg.psi2 / (1.0 + std::exp(k * errors.sigma));
  return out;
}

double reward(const Eigen::Vector3d& achieved_deriv,
              const Eigen::Vector3d& reference_deriv,
              const Eigen::Vector3d& action, const StabilizationErrors& errors,
              double t, const RewardConfig& cfg) {
  return reward_terms(achieved_deriv, reference_deriv, action, errors, t, cfg)
      .total();
}

std::vector<double> terminal_bonus_profile(const StabilizationErrors& errors,
                                           const std::vector<double>& t_grid,
                                           const RewardConfig& cfg) {
  std::vector<double> out;
  out.reserve(t_grid.size());
  for (const double t : t_grid) {
    const RewardTerms terms = reward_terms(Eigen::Vector3d::Zero(),
                                           Eigen::Vector3d::Zero(),
                                           Eigen::Vector3d::Zero(), errors, t,
                                           cfg);
    out.push_back(terms.rotation_bonus + terms.position_bonus);
  }
  return out;
}

}  // namespace floatrl
