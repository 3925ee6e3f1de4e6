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

#include <gtest/gtest.h>

namespace floatrl {
namespace {

GaussianPolicy make_policy(unsigned seed, double scale) {
  Rng rng(seed);
  GaussianPolicy p;
  p.mean_net = Mlp::make({6, 8, 3}, rng, scale);
  p.log_std = Eigen::VectorXd::Constant(3, std::log(0.5));
  return p;
}

Mlp make_critic(unsigned seed) {
  Rng rng(seed);
  return Mlp::make({6, 8, 1}, rng, 0.01);
}

TEST(SuccessCheck, PositionStrictOthersInclusive) {
  const EpisodeConfig cfg;
  PlatformState target;
  PlatformState s;
  s.x = 0.05;
  EXPECT_FALSE(success_check(s, target, cfg));
  s.x = 0.049;
  EXPECT_TRUE(success_check(s, target, cfg));
  s.vx = cfg.success_speed;
  EXPECT_TRUE(success_check(s, target, cfg));
  s.vx = cfg.success_speed + 1e-6;
  EXPECT_FALSE(success_check(s, target, cfg));
  s.vx = 0.0;
  s.omega = cfg.success_rate;
  EXPECT_TRUE(success_check(s, target, cfg));
  s.omega = -cfg.success_rate - 1e-9;
  EXPECT_FALSE(success_check(s, target, cfg));
}

TEST(Environment, ZeroPolicyRunsToTimeLimit) {
  EnvConfig cfg;
  cfg.reward.mode = RewardMode::kPpoOnly;
  cfg.episode.test_time_limit = 5.0;
  cfg.episode.init_speed = 0.0;
  cfg.episode.init_rate = 0.0;
  Environment env(cfg);
  const GaussianPolicy policy = make_policy(30, 0.0);
  const Mlp critic = make_critic(31);
  RunningNormalizer norm(6);
  Rng rng(32);
  const EpisodeResult r =
      env.run_episode(policy, critic, norm, RunMode::kTest, rng);
  EXPECT_FALSE(r.success);
  EXPECT_FALSE(r.out_of_bounds);
  EXPECT_DOUBLE_EQ(r.duration, 5.0);
  ASSERT_EQ(r.records.size(), 50u);
  ASSERT_EQ(r.episode.steps.size(), 50u);
  double total = 0.0;
  for (const StepRecord& rec : r.records) {
    EXPECT_EQ(rec.reward, rec.terms.total());
    total += rec.reward;
  }
  EXPECT_DOUBLE_EQ(r.cumulative_reward, total);
  EXPECT_DOUBLE_EQ(r.episode.cumulative_reward(), total);
  // A motionless platform keeps its pose; only the final transition is done.
  EXPECT_EQ(r.final_state.x, r.records.front().state.x);
  for (std::size_t i = 0; i + 1 < r.episode.steps.size(); ++i) {
    EXPECT_FALSE(r.episode.steps[i].done);
  }
  EXPECT_TRUE(r.episode.steps.back().done);
}

TEST(Environment, StartingAtTargetSucceedsImmediately) {
  EnvConfig cfg;
  cfg.reward.mode = RewardMode::kPpoOnly;
  cfg.episode.init_pos_x = 0.0;
  cfg.episode.init_pos_y = 0.0;
  cfg.episode.init_speed = 0.0;
  cfg.episode.init_rate = 0.0;
  cfg.episode.test_time_limit = 1.0;
  Environment env(cfg);
  const GaussianPolicy policy = make_policy(33, 0.1);
  const Mlp critic = make_critic(34);
  RunningNormalizer norm(6);
  // The heading is drawn uniformly, so retry until one starts inside the
  // success cone; that episode must terminate before its first step.
  Rng rng(35);
  bool found = false;
  for (int attempt = 0; attempt < 2000 && !found; ++attempt) {
    const EpisodeResult r =
        env.run_episode(policy, critic, norm, RunMode::kTest, rng);
    if (!r.records.empty()) continue;
    found = true;
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.duration, 0.0);
    EXPECT_EQ(r.cumulative_reward, 0.0);
    EXPECT_LE(std::abs(r.final_state.theta), cfg.episode.success_angle);
  }
  EXPECT_TRUE(found);
}

TEST(Environment, LeavingRoomEndsWithPenalty) {
  EnvConfig cfg;
  cfg.reward.mode = RewardMode::kPpoOnly;
  cfg.episode.room_half_x = 0.4;
  cfg.episode.room_half_y = 0.4;
  cfg.episode.init_pos_x = 0.3;
  cfg.episode.init_pos_y = 0.1;
  cfg.episode.init_speed = 0.0;
  cfg.episode.init_rate = 0.0;
  cfg.episode.test_time_limit = 60.0;
  Environment env(cfg);
  // A constant push: the bias-only net outputs a fixed positive wrench.
  GaussianPolicy policy = make_policy(36, 0.0);
  policy.mean_net.biases.back() << 1.0, 0.0, 0.0;
  const Mlp critic = make_critic(37);
  RunningNormalizer norm(6);
  Rng rng(38);
  const EpisodeResult r =
      env.run_episode(policy, critic, norm, RunMode::kTest, rng);
  ASSERT_TRUE(r.out_of_bounds);
  EXPECT_FALSE(r.success);
  EXPECT_GT(std::abs(r.final_state.x), cfg.episode.room_half_x);
  const StepRecord& last = r.records.back();
  EXPECT_DOUBLE_EQ(last.reward, last.terms.total() + cfg.episode.bound_penalty);
  for (std::size_t i = 0; i + 1 < r.records.size(); ++i) {
    EXPECT_EQ(r.records[i].reward, r.records[i].terms.total());
  }
  EXPECT_TRUE(r.episode.steps.back().done);
}

TEST(Environment, RealizedWrenchStaysInActuatorBox) {
  EnvConfig cfg;
  cfg.reward.mode = RewardMode::kPpoOnly;
  cfg.episode.test_time_limit = 10.0;
  Environment env(cfg);
  const Eigen::Vector3d limits = env.wrench_scale();
  EXPECT_NEAR(limits[0], 2.0, 1e-12);
  EXPECT_NEAR(limits[1], 2.0, 1e-12);
  EXPECT_NEAR(limits[2], 1.0, 1e-12);
  // Large weights drive the pre-clamp action far outside [-1, 1].
  const GaussianPolicy policy = make_policy(39, 5.0);
  const Mlp critic = make_critic(40);
  RunningNormalizer norm(6);
  Rng rng(41);
  const EpisodeResult r =
      env.run_episode(policy, critic, norm, RunMode::kTest, rng);
  ASSERT_FALSE(r.records.empty());
  for (const StepRecord& rec : r.records) {
    EXPECT_LE(std::abs(rec.commanded.fx), limits[0] + 1e-12);
    EXPECT_LE(std::abs(rec.commanded.fy), limits[1] + 1e-12);
    EXPECT_LE(std::abs(rec.commanded.torque), limits[2] + 1e-12);
    EXPECT_LE(std::abs(rec.realized.fx), limits[0] + 1e-12);
    EXPECT_LE(std::abs(rec.realized.fy), limits[1] + 1e-12);
    EXPECT_LE(std::abs(rec.realized.torque), limits[2] + 1e-12);
    for (int i = 0; i < rec.nozzle_duty.size(); ++i) {
      EXPECT_GE(rec.nozzle_duty[i], 0.0);
      EXPECT_LE(rec.nozzle_duty[i], 1.0);
    }
  }
}

TEST(Environment, RewardModeChangesGuidanceNotTrajectory) {
  EnvConfig guided_cfg;
  guided_cfg.reward.mode = RewardMode::kMpcGuided;
  guided_cfg.episode.test_time_limit = 5.0;
  EnvConfig plain_cfg = guided_cfg;
  plain_cfg.reward.mode = RewardMode::kPpoOnly;
  Environment guided(guided_cfg);
  Environment plain(plain_cfg);

  const GaussianPolicy policy = make_policy(42, 0.1);
  const Mlp critic = make_critic(43);
  RunningNormalizer norm_a(6);
  RunningNormalizer norm_b(6);
  Rng rng_a(44);
  Rng rng_b(44);
  const EpisodeResult a =
      guided.run_episode(policy, critic, norm_a, RunMode::kTest, rng_a);
  const EpisodeResult b =
      plain.run_episode(policy, critic, norm_b, RunMode::kTest, rng_b);
  ASSERT_EQ(a.records.size(), b.records.size());
  ASSERT_FALSE(a.records.empty());
  bool guidance_differs = false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_TRUE(a.records[i].state.vec() == b.records[i].state.vec());
    EXPECT_TRUE(a.records[i].action == b.records[i].action);
    EXPECT_EQ(a.records[i].terms.effort_term, b.records[i].terms.effort_term);
    EXPECT_EQ(a.records[i].terms.rotation_bonus,
              b.records[i].terms.rotation_bonus);
    if (a.records[i].terms.deriv_term != b.records[i].terms.deriv_term) {
      guidance_differs = true;
    }
  }
  EXPECT_TRUE(guidance_differs);
}

TEST(Environment, NormalizerUpdatesOnlyInTrainMode) {
  EnvConfig cfg;
  cfg.reward.mode = RewardMode::kPpoOnly;
  cfg.episode.test_time_limit = 2.0;
  cfg.episode.train_time_limit = 2.0;
  Environment env(cfg);
  const GaussianPolicy policy = make_policy(45, 0.1);
  const Mlp critic = make_critic(46);
  RunningNormalizer norm(6);
  Rng rng(47);
  const EpisodeResult test_run =
      env.run_episode(policy, critic, norm, RunMode::kTest, rng);
  EXPECT_EQ(norm.count(), 0.0);
  const EpisodeResult train_run =
      env.run_episode(policy, critic, norm, RunMode::kTrain, rng);
  EXPECT_EQ(norm.count(), static_cast<double>(train_run.records.size()));
  EXPECT_GT(norm.count(), 0.0);
  // Sampled actions carry their log-probabilities; mean actions do not.
  for (const Transition& tr : train_run.episode.steps) {
    EXPECT_NE(tr.old_log_prob, 0.0);
  }
  for (const Transition& tr : test_run.episode.steps) {
    EXPECT_EQ(tr.old_log_prob, 0.0);
  }
}

TEST(Environment, DisturbedRunAppliesImpulsesAndIgnoresSuccess) {
  EnvConfig cfg;
  cfg.reward.mode = RewardMode::kPpoOnly;
  Environment env(cfg);
  const GaussianPolicy policy = make_policy(48, 0.0);
  RunningNormalizer norm(6);
  DisturbanceSchedule schedule;
  schedule.duration = 3.0;
  schedule.events = {{1.0, {0.15, 0.0, 0.0}}};
  const EpisodeResult r = env.run_disturbed(policy, norm, schedule);
  ASSERT_EQ(r.records.size(), 30u);
  // Starts at the target (a success state) yet keeps running.
  EXPECT_EQ(r.records[0].state.vx, 0.0);
  EXPECT_TRUE(r.records[0].success_now);
  // The kick lands at t = 1.0 and shows up in that step's recorded state.
  EXPECT_DOUBLE_EQ(r.records[10].state.vx, 0.15);
  EXPECT_DOUBLE_EQ(r.duration, 3.0);
}

TEST(Environment, DisturbedRunRejectsBadSchedules) {
  EnvConfig cfg;
  cfg.reward.mode = RewardMode::kPpoOnly;
  Environment env(cfg);
  const GaussianPolicy policy = make_policy(49, 0.0);
  RunningNormalizer norm(6);
  DisturbanceSchedule out_of_range;
  out_of_range.duration = 10.0;
  out_of_range.events = {{10.0, {0.1, 0.0, 0.0}}};
  EXPECT_THROW(env.run_disturbed(policy, norm, out_of_range),
               std::invalid_argument);
  DisturbanceSchedule unordered;
  unordered.duration = 10.0;
  unordered.events = {{2.0, {0.1, 0.0, 0.0}}, {2.0, {0.1, 0.0, 0.0}}};
  EXPECT_THROW(env.run_disturbed(policy, norm, unordered),
               std::invalid_argument);
}

TEST(Environment, RejectsMismatchedControlPeriod) {
  EnvConfig cfg;
  cfg.episode.control_dt = 0.2;
  EXPECT_THROW({ Environment env(cfg); }, std::invalid_argument);
}

TEST(DisturbanceScheduleDefault, FourSpacedEvents) {
  const DisturbanceSchedule s = DisturbanceSchedule::default_schedule();
  ASSERT_EQ(s.events.size(), 4u);
  EXPECT_EQ(s.duration, 100.0);
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    EXPECT_DOUBLE_EQ(s.events[i].t, 20.0 * (i + 1));
    EXPECT_LT(s.events[i].t, s.duration);
  }
  const Disturbance& first = s.events[0].impulse;
  EXPECT_DOUBLE_EQ(first.dvx, 0.15);
  EXPECT_DOUBLE_EQ(first.dvy, 0.0);
}

}  // namespace
}  // namespace floatrl
