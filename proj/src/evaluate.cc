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

#include "floatrl/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "floatrl/csv.hpp"

namespace floatrl {

EvaluationResult evaluate(Environment& env, const GaussianPolicy& policy,
                          const RunningNormalizer& normalizer,
                          const DisturbanceSchedule& schedule,
                          const PlatformState* initial) {
  EvaluationResult result;
  result.episode = env.run_disturbed(policy, normalizer, schedule, initial);
  result.metrics =
      disturbance_metrics(result.episode, schedule, env.config().episode);
  result.all_recovered =
      !result.metrics.empty() &&
      std::all_of(result.metrics.begin(), result.metrics.end(),
                  [](const DisturbanceMetrics& m) { return m.recovered; });
  return result;
}

std::vector<DisturbanceMetrics> disturbance_metrics(
    const EpisodeResult& episode, const DisturbanceSchedule& schedule,
    const EpisodeConfig& cfg) {
  std::vector<DisturbanceMetrics> out;
  const auto& records = episode.records;
  for (std::size_t e = 0; e < schedule.events.size(); ++e) {
    const double t_begin = schedule.events[e].t;
    const double t_end = e + 1 < schedule.events.size()
                             ? schedule.events[e + 1].t
                             : schedule.duration;
    DisturbanceMetrics m;
    m.t_event = t_begin;
    m.time_to_recover = std::numeric_limits<double>::infinity();

    // Records whose step starts inside [t_begin, t_end). The recorded state
    // is pre-step, so the first row at t_begin already includes the impulse.
    std::size_t first = records.size();
    std::size_t last = records.size();  // one past
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (first == records.size() && records[i].t >= t_begin - 1e-9) first = i;
      if (records[i].t < t_end - 1e-9) last = i + 1;
    }
    // No records in the interval: the run ended before this impulse fired,
    // so there is no disturbance to report on.
    if (first >= last) continue;

    for (std::size_t i = first; i < last; ++i) {
      const PlatformState& s = records[i].state;
      const double pos = std::hypot(s.x - cfg.target.x, s.y - cfg.target.y);
      const double ang = std::abs(wrap_angle(s.theta - cfg.target.theta));
      m.peak_position_error = std::max(m.peak_position_error, pos);
      m.peak_angle_error = std::max(m.peak_angle_error, ang);
    }

    // Recovery: the latest run of success that extends to the interval end.
    std::size_t hold_start = last;
    for (std::size_t i = last; i-- > first;) {
      if (!records[i].success_now) break;
      hold_start = i;
    }
    if (hold_start < last) {
      m.recovered = true;
      m.time_to_recover = records[hold_start].t - t_begin;
    }

    const std::size_t tail = std::max<std::size_t>(1, (last - first) / 5);
    double pos_sum = 0.0, ang_sum = 0.0, speed_sum = 0.0, rate_sum = 0.0;
    for (std::size_t i = last - tail; i < last; ++i) {
      const PlatformState& s = records[i].state;
      pos_sum += std::hypot(s.x - cfg.target.x, s.y - cfg.target.y);
      ang_sum += std::abs(wrap_angle(s.theta - cfg.target.theta));
      speed_sum += std::hypot(s.vx - cfg.target.vx, s.vy - cfg.target.vy);
      rate_sum += std::abs(s.omega - cfg.target.omega);
    }
    m.steady_state_position = pos_sum / tail;
    m.steady_state_angle = ang_sum / tail;
    m.steady_state_speed = speed_sum / tail;
    m.steady_state_rate = rate_sum / tail;
    out.push_back(m);
  }
  return out;
}

void write_step_csv(const std::string& path, const EpisodeResult& episode,
                    const EpisodeConfig& cfg) {
  std::vector<std::string> columns = {
      "t",       "x",        "y",        "vx",        "vy",
      "theta",   "omega",    "pos_err",  "angle_err", "action_fx",
      "action_fy", "action_tau", "cmd_fx", "cmd_fy",  "cmd_tau",
      "real_fx", "real_fy",  "real_tau", "deriv_term", "effort_term",
      "rotation_bonus", "position_bonus", "reward",  "success"};
  const int n_nozzles = episode.records.empty()
                            ? 0
                            : static_cast<int>(episode.records[0].nozzle_duty.size());
  for (int i = 0; i < n_nozzles; ++i) {
    columns.push_back("duty_" + std::to_string(i));
  }
  CsvWriter csv(path, columns);
  for (const StepRecord& r : episode.records) {
    const PlatformState& s = r.state;
    std::vector<double> row = {
        r.t,
        s.x,
        s.y,
        s.vx,
        s.vy,
        s.theta,
        s.omega,
        std::hypot(s.x - cfg.target.x, s.y - cfg.target.y),
        std::abs(wrap_angle(s.theta - cfg.target.theta)),
        r.action[0],
        r.action[1],
        r.action[2],
        r.commanded.fx,
        r.commanded.fy,
        r.commanded.torque,
        r.realized.fx,
        r.realized.fy,
        r.realized.torque,
        r.terms.deriv_term,
        r.terms.effort_term,
        r.terms.rotation_bonus,
        r.terms.position_bonus,
        r.reward,
        r.success_now ? 1.0 : 0.0};
    for (int i = 0; i < n_nozzles; ++i) row.push_back(r.nozzle_duty[i]);
    csv.row(row);
  }
}

void write_metrics_csv(const std::string& path,
                       const std::vector<DisturbanceMetrics>& metrics) {
  CsvWriter csv(path, {"t_event", "peak_position_error", "peak_angle_error",
                       "recovered", "time_to_recover", "steady_state_position",
                       "steady_state_angle", "steady_state_speed",
                       "steady_state_rate"});
  for (const DisturbanceMetrics& m : metrics) {
    csv.row({m.t_event, m.peak_position_error, m.peak_angle_error,
             m.recovered ? 1.0 : 0.0, m.time_to_recover,
             m.steady_state_position, m.steady_state_angle,
             m.steady_state_speed, m.steady_state_rate});
  }
}

}  // namespace floatrl
