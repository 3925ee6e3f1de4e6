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

#include "floatrl/env.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace floatrl {

bool success_check(const PlatformState& state, const PlatformState& target,
                   const EpisodeConfig& cfg) {
  const double pos_err = std::hypot(state.x - target.x, state.y - target.y);
  const double speed = std::hypot(state.vx - target.vx, state.vy - target.vy);
  const double angle_err = std::abs(wrap_angle(state.theta - target.theta));
  const double rate_err = std::abs(state.omega - target.omega);
  return pos_err < cfg.success_position && speed <= cfg.success_speed &&
         angle_err <= cfg.success_angle && rate_err <= cfg.success_rate;
}

DisturbanceSchedule DisturbanceSchedule::default_schedule() {
  DisturbanceSchedule s;
  s.duration = 100.0;
  constexpr double kDeg = EpisodeConfig::kDegree;
  constexpr double kDiag = 0.15 * std::numbers::sqrt2 / 2.0;
  s.events = {
      {20.0, {0.15, 0.0, 0.0}},
      {40.0, {0.0, 0.0, 8.0 * kDeg}},
      {60.0, {-kDiag, kDiag, 0.0}},
      {80.0, {0.0, -0.15, -3.0 * kDeg}},
  };
  return s;
}

Environment::Environment(const EnvConfig& cfg)
    : cfg_(cfg),
      allocator_(cfg.thrusters),
      wrench_scale_(allocator_.axis_limits()) {
  if (cfg_.episode.control_dt != cfg_.platform.dt) {
    throw std::invalid_argument("control period must equal the dynamics step");
  }
  if (cfg_.reward.mode == RewardMode::kMpcGuided) {
    mpc_.emplace(cfg_.platform, cfg_.mpc, cfg_.mpc_weights);
  }
}

PlatformState Environment::sample_initial_state(Rng& rng) const {
  const EpisodeConfig& e = cfg_.episode;
  PlatformState s;
  s.x = e.target.x + rng.uniform(-e.init_pos_x, e.init_pos_x);
  s.y = e.target.y + rng.uniform(-e.init_pos_y, e.init_pos_y);
  s.theta = rng.uniform(-std::numbers::pi, std::numbers::pi);
  if (s.theta <= -std::numbers::pi) s.theta = std::numbers::pi;
  s.vx = e.target.vx + rng.uniform(-e.init_speed, e.init_speed);
  s.vy = e.target.vy + rng.uniform(-e.init_speed, e.init_speed);
  s.omega = e.target.omega + rng.uniform(-e.init_rate, e.init_rate);
  return s;
}

EpisodeResult Environment::run_episode(const GaussianPolicy& policy,
                                       const Mlp& critic,
                                       RunningNormalizer& normalizer,
                                       RunMode mode, Rng& rng) {
  LoopSettings settings;
  settings.mode = mode;
  settings.stop_on_success = true;
  settings.time_limit = (mode == RunMode::kTrain)
                            ? cfg_.episode.train_time_limit
                            : cfg_.episode.test_time_limit;
  settings.critic = &critic;
  settings.rng = &rng;
  if (mode == RunMode::kTrain) settings.normalizer_updates = &normalizer;
  const PlatformState initial = sample_initial_state(rng);
  return run_loop(policy, normalizer, initial, settings);
}

EpisodeResult Environment::run_disturbed(const GaussianPolicy& policy,
                                         const RunningNormalizer& normalizer,
                                         const DisturbanceSchedule& schedule,
                                         const PlatformState* initial) {
  for (std::size_t i = 0; i < schedule.events.size(); ++i) {
    const double t = schedule.events[i].t;
    if (t < 0.0 || t >= schedule.duration ||
        (i > 0 && t <= schedule.events[i - 1].t)) {
      throw std::invalid_argument(
          "disturbance times must be strictly increasing within the run");
    }
  }
  LoopSettings settings;
  settings.mode = RunMode::kTest;
  settings.stop_on_success = false;
  settings.time_limit = schedule.duration;
  settings.schedule = &schedule;
  const PlatformState start = initial ? *initial : cfg_.episode.target;
  return run_loop(policy, normalizer, start, settings);
}

EpisodeResult Environment::run_loop(const GaussianPolicy& policy,
                                    const RunningNormalizer& normalizer,
                                    const PlatformState& initial,
                                    const LoopSettings& settings) const {
  const EpisodeConfig& e = cfg_.episode;
  const double dt = e.control_dt;
  const int max_steps = static_cast<int>(std::lround(settings.time_limit / dt));
  const int n_nozzles = cfg_.thrusters.count();

  EpisodeResult result;
  PlatformState state = initial;
  std::vector<PwpfState> modulators(n_nozzles);
  std::size_t next_event = 0;

  for (int k = 0; k < max_steps; ++k) {
    const double t = k * dt;
    if (settings.schedule) {
      while (next_event < settings.schedule->events.size() &&
             settings.schedule->events[next_event].t <= t + 1e-9) {
        state = apply_disturbance(
            state, settings.schedule->events[next_event].impulse);
        ++next_event;
      }
    }
    if (settings.stop_on_success && success_check(state, e.target, cfg_.episode)) {
      result.success = true;
      result.duration = t;
      break;
    }

    Vec6 obs_raw;
    obs_raw << state.x - e.target.x, state.y - e.target.y,
        state.vx - e.target.vx, state.vy - e.target.vy,
        wrap_angle(state.theta - e.target.theta), state.omega - e.target.omega;
    if (settings.normalizer_updates) settings.normalizer_updates->update(obs_raw);
    const Eigen::VectorXd obs = normalizer.apply(obs_raw);

    Eigen::VectorXd action;
    double log_prob = 0.0;
    if (settings.mode == RunMode::kTrain) {
      const PolicySample sample = policy_sample(policy, obs, *settings.rng);
      action = sample.action;
      log_prob = sample.log_prob;
    } else {
      action = mlp_forward(policy.mean_net, obs);
    }
    const double value =
        settings.critic ? mlp_forward(*settings.critic, obs)[0] : 0.0;

    const Eigen::Vector3d clamped =
        action.cwiseMax(-1.0).cwiseMin(1.0).head<3>();
    const Eigen::Vector3d wrench_vec = clamped.cwiseProduct(wrench_scale_);
    const BodyWrench commanded{wrench_vec[0], wrench_vec[1], wrench_vec[2]};

    const Allocation alloc = allocator_.allocate(commanded);
    Eigen::VectorXd pulse_duty(n_nozzles);
    for (int i = 0; i < n_nozzles; ++i) {
      pulse_duty[i] =
          pwpf_period(modulators[i], alloc.duties[i], dt, cfg_.pwpf);
    }
    const BodyWrench realized = thruster_wrench(cfg_.thrusters, pulse_duty);

    const Vec6 achieved6 = state_derivative(state, realized, cfg_.platform);
    const Eigen::Vector3d achieved{achieved6[2], achieved6[3], achieved6[5]};
    Eigen::Vector3d reference = Eigen::Vector3d::Zero();
    if (cfg_.reward.mode == RewardMode::kMpcGuided) {
      const MpcSolution sol = mpc_->control(state);
      const Vec6& ref6 = reference_derivative(sol, 0);
      reference = {ref6[2], ref6[3], ref6[5]};
    }
    const StabilizationErrors errors = stabilization_errors(state, e.target);
    const RewardTerms terms =
        reward_terms(achieved, reference, clamped, errors, t, cfg_.reward);
    double step_reward = terms.total();

    const PlatformState next = step(state, realized, cfg_.platform);
    if (!next.vec().allFinite()) {
      std::ostringstream msg;
      msg << "episode aborted: non-finite state at t=" << t + dt;
      throw std::runtime_error(msg.str());
    }
    const bool exited = std::abs(next.x) > e.room_half_x ||
                        std::abs(next.y) > e.room_half_y;
    if (exited) step_reward += e.bound_penalty;

    StepRecord rec;
    rec.t = t;
    rec.state = state;
    rec.action = action.head<3>();
    rec.commanded = commanded;
    rec.realized = realized;
    rec.nozzle_duty = pulse_duty;
    rec.terms = terms;
    rec.reward = step_reward;
    rec.success_now = success_check(state, e.target, cfg_.episode);
    result.records.push_back(std::move(rec));

    Transition tr;
    tr.observation = obs;
    tr.action = action;
    tr.reward = step_reward;
    tr.old_log_prob = log_prob;
    tr.value_estimate = value;
    tr.done = exited;
    result.episode.steps.push_back(std::move(tr));

    result.cumulative_reward += step_reward;
    state = next;
    result.duration = t + dt;
    if (exited) {
      result.out_of_bounds = true;
      break;
    }
  }

  result.final_state = state;
  if (!result.out_of_bounds && !result.success) {
    result.success = success_check(state, e.target, cfg_.episode);
  }
  if (!result.episode.steps.empty()) result.episode.steps.back().done = true;
  return result;
}

}  // namespace floatrl
