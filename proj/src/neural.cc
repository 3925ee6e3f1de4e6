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

#include "floatrl/neural.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace floatrl {

void tanh_inplace(Eigen::MatrixXd& x) {
  x.array() = 1.0 - 2.0 / ((2.0 * x.array()).exp() + 1.0);
}

Mlp Mlp::make(const std::vector<int>& layer_sizes, Rng& rng,
              double output_scale) {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("mlp needs at least input and output layers");
  }
  Mlp net;
  net.sizes = layer_sizes;
  const int n_layers = static_cast<int>(layer_sizes.size()) - 1;
  net.weights.reserve(n_layers);
  net.biases.reserve(n_layers);
  for (int l = 0; l < n_layers; ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
    const double scale = (l == n_layers - 1) ? output_scale : 1.0;
    Eigen::MatrixXd w(fan_out, fan_in);
    // Row-major fill so the sampling order matches the checkpoint layout.
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) {
        w(r, c) = scale * rng.uniform(-limit, limit);
      }
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return net;
}

int Mlp::parameter_count() const {
  int n = 0;
  for (int l = 0; l < layer_count(); ++l) {
    n += static_cast<int>(weights[l].size() + biases[l].size());
  }
  return n;
}

Eigen::VectorXd Mlp::parameters() const {
  Eigen::VectorXd flat(parameter_count());
  int at = 0;
  for (int l = 0; l < layer_count(); ++l) {
    const auto& w = weights[l];
    for (int r = 0; r < w.rows(); ++r) {
      for (int c = 0; c < w.cols(); ++c) flat[at++] = w(r, c);
    }
    for (int r = 0; r < biases[l].size(); ++r) flat[at++] = biases[l][r];
  }
  return flat;
}

void Mlp::set_parameters(const Eigen::VectorXd& flat) {
  if (flat.size() != parameter_count()) {
    throw std::invalid_argument("parameter vector size mismatch");
  }
  int at = 0;
  for (int l = 0; l < layer_count(); ++l) {
    auto& w = weights[l];
    for (int r = 0; r < w.rows(); ++r) {
      for (int c = 0; c < w.cols(); ++c) w(r, c) = flat[at++];
    }
    for (int r = 0; r < biases[l].size(); ++r) biases[l][r] = flat[at++];
  }
}

Eigen::MatrixXd mlp_forward(const Mlp& net, const Eigen::MatrixXd& input,
                            MlpCache* cache) {
  if (input.rows() != net.input_dim()) {
    throw std::invalid_argument("input dimension mismatch");
  }
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(input);
  }
  Eigen::MatrixXd a = input;
  for (int l = 0; l < net.layer_count(); ++l) {
    Eigen::MatrixXd z = net.weights[l] * a;
    z.colwise() += net.biases[l];
    if (l + 1 < net.layer_count()) tanh_inplace(z);
    a = std::move(z);
    if (cache) cache->activations.push_back(a);
  }
  return a;
}

Eigen::VectorXd mlp_forward(const Mlp& net, const Eigen::VectorXd& input) {
  return mlp_forward(net, Eigen::MatrixXd(input), nullptr).col(0);
}

Eigen::VectorXd mlp_backward(const Mlp& net, const MlpCache& cache,
                             const Eigen::MatrixXd& output_grad,
                             Eigen::MatrixXd* input_grad) {
  const int n_layers = net.layer_count();
  if (static_cast<int>(cache.activations.size()) != n_layers + 1) {
    throw std::invalid_argument("cache does not match network");
  }
  if (output_grad.rows() != net.output_dim() ||
      output_grad.cols() != cache.activations[0].cols()) {
    throw std::invalid_argument("output gradient shape mismatch");
  }
  Eigen::VectorXd flat(net.parameter_count());
  int tail = static_cast<int>(flat.size());
  Eigen::MatrixXd delta = output_grad;
  for (int l = n_layers - 1; l >= 0; --l) {
    const Eigen::MatrixXd& a_in = cache.activations[l];
    const Eigen::VectorXd db = delta.rowwise().sum();
    const Eigen::MatrixXd dw = delta * a_in.transpose();
    tail -= static_cast<int>(db.size());
    flat.segment(tail, db.size()) = db;
    tail -= static_cast<int>(dw.size());
    for (int r = 0; r < dw.rows(); ++r) {
      flat.segment(tail + r * dw.cols(), dw.cols()) = dw.row(r);
    }
    if (l > 0) {
      delta = net.weights[l].transpose() * delta;
      // Hidden activations are tanh; derivative from the stored output.
      delta.array() *= 1.0 - cache.activations[l].array().square();
    } else if (input_grad) {
      *input_grad = net.weights[0].transpose() * delta;
    }
  }
  return flat;
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
               AdamState& state, StepDirection direction) {
  if (params.size() != grad.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam shape mismatch");
  }
  if (!grad.allFinite()) {
    throw std::runtime_error("non-finite gradient, update rejected");
  }
  state.step += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v +
            (1.0 - state.beta2) * grad.array().square().matrix();
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const Eigen::ArrayXd m_hat = state.m.array() / bc1;
  const Eigen::ArrayXd v_hat = state.v.array() / bc2;
  const Eigen::ArrayXd update = state.lr * m_hat / (v_hat.sqrt() + state.eps);
  if (direction == StepDirection::kAscent) {
    params.array() += update;
  } else {
    params.array() -= update;
  }
}

RunningNormalizer::RunningNormalizer(int dim)
    : mean_(Eigen::VectorXd::Zero(dim)), m2_(Eigen::VectorXd::Zero(dim)) {}

void RunningNormalizer::update(const Eigen::VectorXd& sample) {
  if (sample.size() != mean_.size()) {
    throw std::invalid_argument("normalizer dimension mismatch");
  }
  count_ += 1.0;
  const Eigen::VectorXd d1 = sample - mean_;
  mean_ += d1 / count_;
  m2_.array() += d1.array() * (sample - mean_).array();
}

Eigen::VectorXd RunningNormalizer::variance() const {
  if (count_ <= 0.0) return Eigen::VectorXd::Zero(mean_.size());
  return m2_ / count_;
}

Eigen::VectorXd RunningNormalizer::apply(const Eigen::VectorXd& sample) const {
  if (count_ <= 0.0) return sample;
  const Eigen::ArrayXd sd = variance().array().sqrt().max(1e-8);
  return ((sample - mean_).array() / sd).matrix();
}

void RunningNormalizer::restore(double count, const Eigen::VectorXd& mean,
                                const Eigen::VectorXd& m2) {
  if (mean.size() != mean_.size() || m2.size() != m2_.size()) {
    throw std::invalid_argument("normalizer dimension mismatch");
  }
  count_ = count;
  mean_ = mean;
  m2_ = m2;
}

Eigen::VectorXd GaussianPolicy::parameters() const {
  Eigen::VectorXd flat(mean_net.parameter_count() + log_std.size());
  flat.head(mean_net.parameter_count()) = mean_net.parameters();
  flat.tail(log_std.size()) = log_std;
  return flat;
}

void GaussianPolicy::set_parameters(const Eigen::VectorXd& flat) {
  if (flat.size() != mean_net.parameter_count() + log_std.size()) {
    throw std::invalid_argument("policy parameter vector size mismatch");
  }
  mean_net.set_parameters(flat.head(mean_net.parameter_count()));
  log_std = flat.tail(log_std.size());
}

namespace {

double gaussian_log_prob(const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& action) {
  constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
  const Eigen::ArrayXd z = (action - mean).array() / log_std.array().exp();
  return -0.5 * (z.square().sum() + static_cast<double>(mean.size()) * kLog2Pi) -
         log_std.sum();
}

}  // namespace

PolicySample policy_sample(const GaussianPolicy& p, const Eigen::VectorXd& obs,
                           Rng& rng) {
  const Eigen::VectorXd mean = mlp_forward(p.mean_net, obs);
  Eigen::VectorXd action(p.action_dim());
  for (int i = 0; i < p.action_dim(); ++i) {
    action[i] = mean[i] + std::exp(p.log_std[i]) * rng.normal();
  }
  return {action, gaussian_log_prob(mean, p.log_std, action)};
}

double policy_log_prob(const GaussianPolicy& p, const Eigen::VectorXd& obs,
                       const Eigen::VectorXd& action) {
  return gaussian_log_prob(mlp_forward(p.mean_net, obs), p.log_std, action);
}

double policy_kl(const GaussianPolicy& p_new, const GaussianPolicy& p_old,
                 const Eigen::MatrixXd& obs_batch) {
  const Eigen::MatrixXd mu_n = mlp_forward(p_new.mean_net, obs_batch);
  const Eigen::MatrixXd mu_o = mlp_forward(p_old.mean_net, obs_batch);
  const Eigen::ArrayXd var_n = (2.0 * p_new.log_std).array().exp();
  const Eigen::ArrayXd var_o = (2.0 * p_old.log_std).array().exp();
  const Eigen::ArrayXd log_ratio = p_old.log_std.array() - p_new.log_std.array();
  if (obs_batch.cols() == 0) return 0.0;
  const double n = static_cast<double>(obs_batch.cols());
  // KL(new||old) = sum_i log(so/sn) + (sn^2 + (mn-mo)^2)/(2 so^2) - 1/2.
  double acc = 0.0;
  for (int c = 0; c < obs_batch.cols(); ++c) {
    const Eigen::ArrayXd dmu = (mu_n.col(c) - mu_o.col(c)).array();
    acc += (log_ratio + (var_n + dmu.square()) / (2.0 * var_o) - 0.5).sum();
  }
  return acc / n;
}

}  // namespace floatrl
