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

#ifndef FLOATRL_PPO_HPP_
#define FLOATRL_PPO_HPP_

#include <vector>

#include <Eigen/Dense>

#include "floatrl/neural.hpp"
#include "floatrl/rng.hpp"

namespace floatrl {

struct Transition {
  Eigen::VectorXd observation;  // normalized
  Eigen::VectorXd action;       // pre-clamp, normalized units
  double reward = 0.0;
  double old_log_prob = 0.0;
  double value_estimate = 0.0;
  bool done = false;
};

struct Episode {
  std::vector<Transition> steps;

  double cumulative_reward() const;
};

struct TrajectoryBatch {
  std::vector<Episode> episodes;

  int transition_count() const;
};

struct PpoConfig {
  double gamma = 0.98;
  double clip_epsilon = 0.2;  // adaptive
  double target_kl = 0.001;
  double actor_lr = 3e-4;  // adaptive
  double critic_lr = 1e-3;
  int epochs = 10;
  int minibatch_size = 4096;
  int batch_episodes = 200;
  // The iteration cap is exposed both as episodes and as updates; whichever
  // trips first stops training.
  int max_episodes = 20000;
  int max_updates = 100;
  // KL adaptation constants.
  double lr_factor = 1.5;
  double eps_factor = 1.2;
  double eps_min = 0.05;
  double eps_max = 0.4;
  double lr_min = 1e-6;
  double lr_max = 1e-2;
};

void validate(const PpoConfig& config);

// Sum_{k=from}^{T} gamma^(k-from) r_k by backward recursion.
double discounted_return(const Episode& episode, double gamma, int from_step);
std::vector<double> episode_returns(const Episode& episode, double gamma);

double clip_ratio(double p, double epsilon);

// Nudges clip_epsilon and actor_lr to keep the measured per-update KL inside
// [target/2, 2*target].
void adapt_kl(double measured_kl, PpoConfig& config);

// Column-flattened batch: column t of each matrix is transition t.
struct BatchData {
  Eigen::MatrixXd obs;
  Eigen::MatrixXd actions;
  Eigen::VectorXd returns;
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd advantages;  // normalized to mean 0, variance 1
  double mean_episode_reward = 0.0;

  int size() const { return static_cast<int>(returns.size()); }
};

// Computes per-step returns, Monte-Carlo advantages against the critic, and
// batch-normalized advantages.
BatchData prepare_batch(const TrajectoryBatch& batch, const Mlp& critic,
                        double gamma);

struct ObjectiveValue {
  double value = 0.0;
  Eigen::VectorXd grad;
};

// Clipped-surrogate mean over the batch; gradient with respect to the actor
// parameter vector (mean net then log_std), flowing only through transitions
// where the min selects the unclipped term.
ObjectiveValue surrogate_objective(const BatchData& data,
                                   const GaussianPolicy& policy,
                                   double epsilon);

// (1/2) mean squared value error and its critic-parameter gradient.
ObjectiveValue value_objective(const BatchData& data, const Mlp& critic);

struct UpdateDiagnostics {
  double surrogate = 0.0;
  double value_loss = 0.0;
  double kl = 0.0;
  double clip_epsilon = 0.0;
  double actor_lr = 0.0;
  double critic_lr = 0.0;
  double mean_episode_reward = 0.0;
  int transitions = 0;
};

// Owns the actor, critic, their optimizer states, and the adaptive config.
class PpoTrainer {
 public:
  PpoTrainer(GaussianPolicy policy, Mlp critic, PpoConfig config);

  // Epochs of minibatch Adam (ascent on the surrogate, descent on the value
  // loss), then KL measurement against the pre-update policy and adaptation.
  // A non-finite objective or gradient rolls both networks back and throws.
  UpdateDiagnostics update(const TrajectoryBatch& batch, Rng& rng);

  const GaussianPolicy& policy() const { return policy_; }
  const Mlp& critic() const { return critic_; }
  const PpoConfig& config() const { return config_; }
  GaussianPolicy& mutable_policy() { return policy_; }
  Mlp& mutable_critic() { return critic_; }
  PpoConfig& mutable_config() { return config_; }
  AdamState& actor_adam() { return actor_adam_; }
  AdamState& critic_adam() { return critic_adam_; }

 private:
  GaussianPolicy policy_;
  Mlp critic_;
  PpoConfig config_;
  AdamState actor_adam_;
  AdamState critic_adam_;
};

}  // namespace floatrl

#endif  // FLOATRL_PPO_HPP_
