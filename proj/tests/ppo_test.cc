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

#include "floatrl/ppo.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "floatrl/neural.hpp"
#include "floatrl/rng.hpp"
#include "verify/oracles.hpp"

namespace floatrl {
namespace {

Episode make_episode(const std::vector<double>& rewards) {
  Episode ep;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    Transition t;
    t.observation = Eigen::VectorXd::Zero(2);
    t.action = Eigen::VectorXd::Zero(1);
    t.reward = rewards[i];
    t.done = i + 1 == rewards.size();
    ep.steps.push_back(t);
  }
  return ep;
}

TEST(Returns, BackwardRecursionMatchesDirectSum) {
  const Episode ep = make_episode({1.0, -2.0, 0.5, 3.0, -1.0});
  const double gamma = 0.98;
  const std::vector<double> rewards = {1.0, -2.0, 0.5, 3.0, -1.0};
  for (int from = 0; from < 5; ++from) {
    EXPECT_NEAR(discounted_return(ep, gamma, from),
                verify::forward_return(rewards, gamma, from), 1e-13);
  }
  const std::vector<double> all = episode_returns(ep, gamma);
  ASSERT_EQ(all.size(), 5u);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(all[i], discounted_return(ep, gamma, i));
  }
  EXPECT_EQ(ep.cumulative_reward(), 1.0 - 2.0 + 0.5 + 3.0 - 1.0);
}

TEST(ClipRatio, Branches) {
  EXPECT_EQ(clip_ratio(1.30, 0.2), 1.2);
  EXPECT_EQ(clip_ratio(0.70, 0.2), 0.8);
  EXPECT_EQ(clip_ratio(1.05, 0.2), 1.05);
  EXPECT_EQ(clip_ratio(0.8, 0.2), 0.8);
  EXPECT_EQ(clip_ratio(1.2, 0.2), 1.2);
}

TEST(AdaptKl, RaisesLowersAndClamps) {
  PpoConfig cfg;
  const double lr0 = cfg.actor_lr;
  const double eps0 = cfg.clip_epsilon;

  PpoConfig high = cfg;
  adapt_kl(2.5 * cfg.target_kl, high);
  EXPECT_NEAR(high.actor_lr, lr0 / cfg.lr_factor, 1e-15);
  EXPECT_NEAR(high.clip_epsilon, eps0 / cfg.eps_factor, 1e-15);

  PpoConfig low = cfg;
  adapt_kl(0.4 * cfg.target_kl, low);
  EXPECT_NEAR(low.actor_lr, lr0 * cfg.lr_factor, 1e-15);
  EXPECT_NEAR(low.clip_epsilon, eps0 * cfg.eps_factor, 1e-15);

  PpoConfig mid = cfg;
  adapt_kl(cfg.target_kl, mid);
  EXPECT_EQ(mid.actor_lr, lr0);
  EXPECT_EQ(mid.clip_epsilon, eps0);

  // Boundary values stay inside the dead band.
  PpoConfig edge = cfg;
  adapt_kl(2.0 * cfg.target_kl, edge);
  EXPECT_EQ(edge.actor_lr, lr0);
  adapt_kl(0.5 * cfg.target_kl, edge);
  EXPECT_EQ(edge.actor_lr, lr0);

  // Repeated adaptation saturates at the configured clamps.
  PpoConfig sat = cfg;
  for (int i = 0; i < 100; ++i) adapt_kl(10.0 * cfg.target_kl, sat);
  EXPECT_GE(sat.actor_lr, cfg.lr_min);
  EXPECT_EQ(sat.clip_epsilon, cfg.eps_min);
  for (int i = 0; i < 100; ++i) adapt_kl(0.0, sat);
  EXPECT_LE(sat.actor_lr, cfg.lr_max);
  EXPECT_EQ(sat.clip_epsilon, cfg.eps_max);
}

TEST(PrepareBatch, ReturnsAdvantagesAndNormalization) {
  Rng rng(16);
  const Mlp critic = Mlp::make({2, 4, 1}, rng);
  TrajectoryBatch batch;
  batch.episodes.push_back(make_episode({1.0, 2.0, 3.0}));
  batch.episodes.push_back(make_episode({-1.0, 0.5}));
  Eigen::VectorXd obs_values(5);
  int idx = 0;
  for (auto& ep : batch.episodes) {
    for (auto& t : ep.steps) {
      t.observation << 0.1 * idx, -0.2 * idx;
      t.action << 0.05 * idx;
      t.old_log_prob = -1.0 - 0.1 * idx;
      ++idx;
    }
  }
  const double gamma = 0.9;
  const BatchData data = prepare_batch(batch, critic, gamma);
  ASSERT_EQ(data.size(), 5);
  ASSERT_EQ(data.obs.cols(), 5);

  // Returns restart at episode boundaries.
  EXPECT_NEAR(data.returns[0], 1.0 + 0.9 * 2.0 + 0.81 * 3.0, 1e-12);
  EXPECT_NEAR(data.returns[2], 3.0, 1e-12);
  EXPECT_NEAR(data.returns[3], -1.0 + 0.9 * 0.5, 1e-12);
  EXPECT_NEAR(data.returns[4], 0.5, 1e-12);

  // Advantages are G - V, then normalized to zero mean, unit variance.
  EXPECT_NEAR(data.advantages.mean(), 0.0, 1e-12);
  const double var =
      data.advantages.squaredNorm() / data.advantages.size() -
      data.advantages.mean() * data.advantages.mean();
  EXPECT_NEAR(var, 1.0, 1e-9);

  // Raw advantage ordering is preserved by the affine normalization.
  Eigen::VectorXd raw(5);
  for (int i = 0; i < 5; ++i) {
    raw[i] = data.returns[i] -
             mlp_forward(critic, Eigen::VectorXd(data.obs.col(i)))[0];
  }
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      if (raw[i] < raw[j]) {
        EXPECT_LT(data.advantages[i], data.advantages[j]);
      }
    }
  }

  EXPECT_NEAR(data.mean_episode_reward, (6.0 + -0.5) / 2.0, 1e-12);
  EXPECT_EQ(data.old_log_probs[2], -1.2);
}

TEST(SurrogateObjective, MatchesManualTwoTransitionInstance) {
  Rng rng(17);
  GaussianPolicy policy;
  policy.mean_net = Mlp::make({2, 3, 1}, rng);
  policy.log_std = Eigen::VectorXd::Constant(1, -0.5);
  BatchData data;
  data.obs.resize(2, 2);
  data.obs << 0.3, -0.7, 0.1, 0.4;
  data.actions.resize(1, 2);
  data.actions << 0.2, -0.3;
  data.returns = Eigen::VectorXd::Zero(2);
  data.advantages.resize(2);
  data.advantages << 1.0, -2.0;
  data.old_log_probs.resize(2);
  const double eps = 0.2;
  // One ratio far above the clip, one inside.
  data.old_log_probs[0] =
      policy_log_prob(policy, data.obs.col(0), data.actions.col(0)) -
      std::log(1.5);
  data.old_log_probs[1] =
      policy_log_prob(policy, data.obs.col(1), data.actions.col(1)) -
      std::log(1.05);

  const ObjectiveValue obj = surrogate_objective(data, policy, eps);
  // Transition 0: ratio 1.5, A = +1 -> min(1.5, 1.2) = 1.2.
  // Transition 1: ratio 1.05, A = -2 -> min(1.05 * -2, 1.05 * -2) = -2.1.
  EXPECT_NEAR(obj.value, (1.2 * 1.0 + 1.05 * -2.0) / 2.0, 1e-12);

  // The clipped transition contributes no gradient; removing it and scaling
  // must leave the gradient unchanged.
  BatchData only_second;
  only_second.obs = data.obs.col(1);
  only_second.actions = data.actions.col(1);
  only_second.returns = Eigen::VectorXd::Zero(1);
  only_second.advantages = data.advantages.segment(1, 1);
  only_second.old_log_probs = data.old_log_probs.segment(1, 1);
  const ObjectiveValue half = surrogate_objective(only_second, policy, eps);
  EXPECT_LT((obj.grad - 0.5 * half.grad).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SurrogateObjective, FullyClippedGradientIsZero) {
  Rng rng(18);
  GaussianPolicy policy;
  policy.mean_net = Mlp::make({2, 3, 1}, rng);
  policy.log_std = Eigen::VectorXd::Constant(1, -0.3);
  const int n = 6;
  BatchData data;
  data.obs.resize(2, n);
  data.actions.resize(1, n);
  data.returns = Eigen::VectorXd::Zero(n);
  data.advantages = Eigen::VectorXd::Ones(n);
  data.old_log_probs.resize(n);
  for (int i = 0; i < n; ++i) {
    data.obs.col(i) << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
    data.actions.col(i) << rng.uniform(-0.5, 0.5);
    // Every ratio is 2.0: above 1 + eps with positive advantage.
    data.old_log_probs[i] =
        policy_log_prob(policy, data.obs.col(i), data.actions.col(i)) -
        std::log(2.0);
  }
  const ObjectiveValue obj = surrogate_objective(data, policy, 0.2);
  EXPECT_NEAR(obj.value, 1.2, 1e-12);
  EXPECT_EQ(obj.grad.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ValueObjective, MatchesManualHalfMeanSquare) {
  Rng rng(19);
  const Mlp critic = Mlp::make({2, 4, 1}, rng);
  BatchData data;
  data.obs.resize(2, 3);
  data.obs << 0.1, -0.2, 0.5, 0.3, 0.8, -0.4;
  data.returns.resize(3);
  data.returns << 1.0, -0.5, 2.0;
  data.actions = Eigen::MatrixXd::Zero(1, 3);
  data.old_log_probs = Eigen::VectorXd::Zero(3);
  data.advantages = Eigen::VectorXd::Zero(3);
  const ObjectiveValue obj = value_objective(data, critic);
  double manual = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double v = mlp_forward(critic, Eigen::VectorXd(data.obs.col(i)))[0];
    manual += 0.5 * (v - data.returns[i]) * (v - data.returns[i]);
  }
  manual /= 3.0;
  EXPECT_NEAR(obj.value, manual, 1e-12);
}

TEST(PpoTrainer, UpdateIsDeterministic) {
  auto build = [](Rng& rng) {
    GaussianPolicy policy;
    policy.mean_net = Mlp::make({2, 8, 1}, rng);
    policy.log_std = Eigen::VectorXd::Constant(1, -0.7);
    Mlp critic = Mlp::make({2, 8, 1}, rng);
    return PpoTrainer(policy, critic, PpoConfig{});
  };
  auto collect = [](Rng& rng) {
    TrajectoryBatch batch;
    for (int e = 0; e < 20; ++e) {
      Episode ep;
      for (int k = 0; k < 5; ++k) {
        Transition t;
        t.observation = Eigen::VectorXd(2);
        t.observation << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
        t.action = Eigen::VectorXd::Constant(1, rng.uniform(-1.0, 1.0));
        t.reward = -t.observation.squaredNorm();
        t.old_log_prob = rng.uniform(-2.0, -1.0);
        t.done = k == 4;
        ep.steps.push_back(t);
      }
      batch.episodes.push_back(ep);
    }
    return batch;
  };
  Rng net_a(20), net_b(20);
  PpoTrainer a = build(net_a);
  PpoTrainer b = build(net_b);
  Rng data_a(21), data_b(21);
  const TrajectoryBatch batch_a = collect(data_a);
  const TrajectoryBatch batch_b = collect(data_b);
  Rng up_a(22), up_b(22);
  const UpdateDiagnostics da = a.update(batch_a, up_a);
  const UpdateDiagnostics db = b.update(batch_b, up_b);
  EXPECT_EQ(da.kl, db.kl);
  EXPECT_EQ(da.surrogate, db.surrogate);
  EXPECT_EQ(da.transitions, 100);
  EXPECT_TRUE(a.policy().parameters() == b.policy().parameters());
}

TEST(PpoTrainer, UpdateMovesPolicyTowardAdvantage) {
  Rng rng(23);
  GaussianPolicy policy;
  policy.mean_net = Mlp::make({2, 8, 1}, rng);
  policy.log_std = Eigen::VectorXd::Constant(1, -0.7);
  Mlp critic = Mlp::make({2, 8, 1}, rng);
  PpoConfig cfg;
  PpoTrainer trainer(policy, critic, cfg);
  const Eigen::VectorXd before = trainer.policy().parameters();
  Rng data_rng(24);
  TrajectoryBatch batch;
  for (int e = 0; e < 50; ++e) {
    Episode ep;
    Transition t;
    t.observation = Eigen::VectorXd(2);
    t.observation << data_rng.uniform(-1.0, 1.0), data_rng.uniform(-1.0, 1.0);
    const PolicySample smp =
        policy_sample(trainer.policy(), t.observation, data_rng);
    t.action = smp.action;
    t.old_log_prob = smp.log_prob;
    // Reward actions matching the first observation component.
    t.reward = -(smp.action[0] - t.observation[0]) *
               (smp.action[0] - t.observation[0]);
    t.done = true;
    ep.steps.push_back(t);
    batch.episodes.push_back(ep);
  }
  Rng up(25);
  const UpdateDiagnostics diag = trainer.update(batch, up);
  EXPECT_FALSE(trainer.policy().parameters() == before);
  EXPECT_GT(diag.kl, 0.0);
  EXPECT_TRUE(std::isfinite(diag.mean_episode_reward));
  EXPECT_TRUE(std::isfinite(diag.surrogate));
  EXPECT_TRUE(std::isfinite(diag.value_loss));
}

TEST(PpoConfig, ValidateRejectsBadValues) {
  PpoConfig good;
  validate(good);
  PpoConfig bad = good;
  bad.gamma = 1.5;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = good;
  bad.clip_epsilon = 0.0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = good;
  bad.minibatch_size = 0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = good;
  bad.batch_episodes = -1;
  EXPECT_THROW(validate(bad), std::invalid_argument);
}

}  // namespace
}  // namespace floatrl
