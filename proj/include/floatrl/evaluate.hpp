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

#ifndef FLOATRL_EVALUATE_HPP_
#define FLOATRL_EVALUATE_HPP_

#include <string>
#include <vector>

#include "floatrl/env.hpp"

namespace floatrl {

// Per-impulse recovery statistics over the interval from its event to the
// next event (or the end of the run).
struct DisturbanceMetrics {
  double t_event = 0.0;               // [s]
  double peak_position_error = 0.0;   // [m]
  double peak_angle_error = 0.0;      // [rad]
  bool recovered = false;             // success holds through interval end
  double time_to_recover = 0.0;       // [s] from the event; inf if never
  // Means over the last fifth of the interval.
  double steady_state_position = 0.0;  // [m]
  double steady_state_angle = 0.0;     // [rad]
  double steady_state_speed = 0.0;     // [m/s]
  double steady_state_rate = 0.0;      // [rad/s]
};

struct EvaluationResult {
  EpisodeResult episode;
  // One entry per event that fired before the run ended; a run that leaves
  // the room is over, and later scheduled events produce no entry.
  std::vector<DisturbanceMetrics> metrics;
  bool all_recovered = false;
};

// Deterministic disturbed run plus per-event metrics. Starts at the target
// unless an initial state is supplied.
EvaluationResult evaluate(Environment& env, const GaussianPolicy& policy,
                          const RunningNormalizer& normalizer,
                          const DisturbanceSchedule& schedule,
                          const PlatformState* initial = nullptr);

// Metrics for an arbitrary episode, intervals delimited by the schedule.
std::vector<DisturbanceMetrics> disturbance_metrics(
    const EpisodeResult& episode, const DisturbanceSchedule& schedule,
    const EpisodeConfig& cfg);

// Per-step trace: state, action, commanded and realized wrench, nozzle
// duties, reward decomposition, success flag.
void write_step_csv(const std::string& path, const EpisodeResult& episode,
                    const EpisodeConfig& cfg);

// One row per event from disturbance_metrics.
void write_metrics_csv(const std::string& path,
                       const std::vector<DisturbanceMetrics>& metrics);

}  // namespace floatrl

#endif  // FLOATRL_EVALUATE_HPP_
