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
#include <numbers>
#include <stdexcept>
#include <utility>

namespace floatrl {

double Episode::cumulative_reward() const {
  double sum = 0.0;
  for (const Transition& tr : steps) sum += tr.reward;
  return sum;
}

int TrajectoryBatch::transition_count() const {
  int n = 0;
  for (const Episode& ep : episodes) n += static_cast<int>(ep.steps.size());
  return n;
}

void validate(const PpoConfig& c) {
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1)");
  }
  if (!(c.clip_epsilon > 0.0 && c.clip_epsilon < 1.0)) {
    throw std::invalid_argument("clip epsilon must lie in (0, 1)");
  }
  if (!(c.target_kl > 0.0)) {
    throw std::invalid_argument("target KL must be positive");
  }
  if (c.epochs < 1 || c.minibatch_size < 1 || c.batch_episodes < 1) {
    throw std::invalid_argument("ppo schedule fields must be positive");
  }
}

double discounted_return(const Episode& episode, double gamma, int from_step) {
  const int t_end = static_cast<int>(episode.steps.size());
  if (from_step < 0 || from_step >= t_end) {
    throw std::out_of_range("return start index outside episode");
  }
  double g = 0.0;
  for (int k = t_end - 1; k >= from_step; --k) {
    g = episode.steps[k].reward + gamma * g;
  }
  return g;
}

std::vector<double> episode_returns(const Episode& episode, double gamma) {
  std::vector<double> g(episode.steps.size());
  double acc = 0.0;
  for (int k = static_cast<int>(episode.steps.size()) - 1; k >= 0; --k) {
    acc = episode.steps[k].reward + gamma * acc;
    g[k] = acc;
  }
  return g;
}

double clip_ratio(double p, double epsilon) {
  if (p < 1.0 - epsilon) return 1.0 - epsilon;
  if (p > 1.0 + epsilon) return 1.0 + epsilon;
  return p;
}

void adapt_kl(double measured_kl, PpoConfig& config) {
  if (measured_kl > 2.0 * config.target_kl) {
    config.actor_lr /= config.lr_factor;
    config.clip_epsilon =
        std::max(config.clip_epsilon / config.eps_factor, config.eps_min);
  } else if (measured_kl < 0.5 * config.target_kl) {
    config.actor_lr *= config.lr_factor;
    config.clip_epsilon =
        std::min(config.clip_epsilon * config.eps_factor, config.eps_max);
  }
  config.actor_lr = std::min(std::max(config.actor_lr, config.lr_min),
                             config.lr_max);
}

BatchData prepare_batch(const TrajectoryBatch& batch, const Mlp& critic,
                        double gamma) {
  const int t_total = batch.transition_count();
  if (t_total == 0) throw std::invalid_argument("empty trajectory batch");
  const int obs_dim = critic.input_dim();
  int act_dim = 0;
  for (const Episode& ep : batch.episodes) {
    if (!ep.steps.empty()) {
      act_dim = static_cast<int>(ep.steps.front().action.size());
      break;
    }
  }

  BatchData data;
  data.obs.resize(obs_dim, t_total);
  data.actions.resize(act_dim, t_total);
  data.returns.resize(t_total);
  data.old_log_probs.resize(t_total);
  int at = 0;
  double reward_sum = 0.0;
  for (const Episode& ep : batch.episodes) {
    const std::vector<double> g = episode_returns(ep, gamma);
    for (std::size_t k = 0; k < ep.steps.size(); ++k) {
      const Transition& tr = ep.steps[k];
      data.obs.col(at) = tr.observation;
      data.actions.col(at) = tr.action;
      data.returns[at] = g[k];
      data.old_log_probs[at] = tr.old_log_prob;
      ++at;
    }
    reward_sum += ep.cumulative_reward();
  }
  data.mean_episode_reward =
      reward_sum / static_cast<double>(batch.episodes.size());

  const Eigen::MatrixXd values = mlp_forward(critic, data.obs);
  data.advantages = data.returns - values.row(0).transpose();
  const double mean = data.advantages.mean();
  data.advantages.array() -= mean;
  const double sd = std::sqrt(data.advantages.array().square().mean());
  if (sd > 1e-12) data.advantages /= sd;
  return data;
}

ObjectiveValue surrogate_objective(const BatchData& data,
                                   const GaussianPolicy& policy,
                                   double epsilon) {
  const int t_total = data.size();
  const int act_dim = policy.action_dim();
  const double inv_t = 1.0 / static_cast<double>(t_total);

  MlpCache cache;
  const Eigen::MatrixXd mu = mlp_forward(policy.mean_net, data.obs, &cache);
  const Eigen::ArrayXd sigma = policy.log_std.array().exp();
  const Eigen::ArrayXd inv_var = (-2.0 * policy.log_std).array().exp();
  const double log_norm =
      policy.log_std.sum() +
      0.5 * act_dim * std::log(2.0 * std::numbers::pi);

  Eigen::MatrixXd z = data.actions - mu;  // residual, later reused for dmu
  Eigen::VectorXd log_prob(t_total);
  for (int t = 0; t < t_total; ++t) {
    log_prob[t] =
        -0.5 * (z.col(t).array().square() * inv_var).sum() - log_norm;
  }

  ObjectiveValue out;
  Eigen::VectorXd weight(t_total);  // d objective / d log_prob_t
  Eigen::VectorXd dlog_std = Eigen::VectorXd::Zero(act_dim);
  double obj = 0.0;
  for (int t = 0; t < t_total; ++t) {
    const double ratio = std::exp(log_prob[t] - data.old_log_probs[t]);
    const double adv = data.advantages[t];
    const double raw = ratio * adv;
    const double clipped = clip_ratio(ratio, epsilon) * adv;
    obj += std::min(raw, clipped);
    weight[t] = (raw <= clipped) ? inv_t * ratio * adv : 0.0;
  }
  out.value = obj * inv_t;

  for (int t = 0; t < t_total; ++t) {
    const Eigen::ArrayXd zs = z.col(t).array() * inv_var;
    dlog_std.array() +=
        weight[t] * (z.col(t).array().square() * inv_var - 1.0);
    z.col(t) = (weight[t] * zs).matrix();  // d objective / d mu_t
  }
  const Eigen::VectorXd mean_grad = mlp_backward(policy.mean_net, cache, z);
  out.grad.resize(mean_grad.size() + act_dim);
  out.grad.head(mean_grad.size()) = mean_grad;
  out.grad.tail(act_dim) = dlog_std;
  return out;
}

ObjectiveValue value_objective(const BatchData& data, const Mlp& critic) {
  const int t_total = data.size();
  MlpCache cache;
  const Eigen::MatrixXd v = mlp_forward(critic, data.obs, &cache);
  const Eigen::RowVectorXd diff = v.row(0) - data.returns.transpose();
  ObjectiveValue out;
  out.value = 0.5 * diff.array().square().mean();
  const Eigen::MatrixXd dv = diff / static_cast<double>(t_total);
  out.grad = mlp_backward(critic, cache, dv);
  return out;
}

namespace {

BatchData gather(const BatchData& data, const std::vector<int>& idx) {
  BatchData sub;
  const int n = static_cast<int>(idx.size());
  sub.obs.resize(data.obs.rows(), n);
  sub.actions.resize(data.actions.rows(), n);
  sub.returns.resize(n);
  sub.old_log_probs.resize(n);
  sub.advantages.resize(n);
  for (int i = 0; i < n; ++i) {
    sub.obs.col(i) = data.obs.col(idx[i]);
    sub.actions.col(i) = data.actions.col(idx[i]);
    sub.returns[i] = data.returns[idx[i]];
    sub.old_log_probs[i] = data.old_log_probs[idx[i]];
    sub.advantages[i] = data.advantages[idx[i]];
  }
  sub.mean_episode_reward = data.mean_episode_reward;
  return sub;
}

}  // namespace

PpoTrainer::PpoTrainer(GaussianPolicy policy, Mlp critic, PpoConfig config)
    : policy_(std::move(policy)),
      critic_(std::move(critic)),
      config_(config),
      actor_adam_(static_cast<int>(policy_.parameters().size()),
                  config.actor_lr),
      critic_adam_(critic_.parameter_count(), config.critic_lr) {
  validate(config_);
  if (critic_.output_dim() != 1) {
    throw std::invalid_argument("critic must have one output");
  }
}

UpdateDiagnostics PpoTrainer::update(const TrajectoryBatch& batch, Rng& rng) {
  const BatchData data = prepare_batch(batch, critic_, config_.gamma);
  const GaussianPolicy old_policy = policy_;
  const Eigen::VectorXd actor_backup = policy_.parameters();
  const Eigen::VectorXd critic_backup = critic_.parameters();
  actor_adam_.lr = config_.actor_lr;
  critic_adam_.lr = config_.critic_lr;

  const int t_total = data.size();
  std::vector<int> perm(t_total);
  try {
    for (int epoch = 0; epoch < config_.epochs; ++epoch) {
      for (int i = 0; i < t_total; ++i) perm[i] = i;
      for (int i = t_total - 1; i > 0; --i) {
        std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
      }
      for (int start = 0; start < t_total; start += config_.minibatch_size) {
        const int len = std::min(config_.minibatch_size, t_total - start);
        const std::vector<int> idx(perm.begin() + start,
                                   perm.begin() + start + len);
        const BatchData sub = gather(data, idx);

        const ObjectiveValue s =
            surrogate_objective(sub, policy_, config_.clip_epsilon);
        if (!std::isfinite(s.value)) {
          throw std::runtime_error("non-finite surrogate objective");
        }
        Eigen::VectorXd actor_params = policy_.parameters();
        adam_step(actor_params, s.grad, actor_adam_, StepDirection::kAscent);
        policy_.set_parameters(actor_params);

        const ObjectiveValue v = value_objective(sub, critic_);
        if (!std::isfinite(v.value)) {
          throw std::runtime_error("non-finite value objective");
        }
        Eigen::VectorXd critic_params = critic_.parameters();
        adam_step(critic_params, v.grad, critic_adam_, StepDirection::kDescent);
        critic_.set_parameters(critic_params);
      }
    }
    if (!policy_.parameters().allFinite() ||
        !critic_.parameters().allFinite()) {
      throw std::runtime_error("non-finite parameters after update");
    }
  } catch (...) {
    policy_.set_parameters(actor_backup);
    critic_.set_parameters(critic_backup);
    throw;
  }

  UpdateDiagnostics diag;
  diag.kl = policy_kl(policy_, old_policy, data.obs);
  diag.surrogate = surrogate_objective(data, policy_, config_.clip_epsilon).value;
  diag.value_loss = value_objective(data, critic_).value;
  adapt_kl(diag.kl, config_);
  diag.clip_epsilon = config_.clip_epsilon;
  diag.actor_lr = config_.actor_lr;
  diag.critic_lr = config_.critic_lr;
  diag.mean_episode_reward = data.mean_episode_reward;
  diag.transitions = t_total;
  return diag;
}

}  // namespace floatrl
