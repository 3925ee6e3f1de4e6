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

#ifndef FLOATRL_NEURAL_HPP_
#define FLOATRL_NEURAL_HPP_

#include <vector>

#include <Eigen/Dense>

#include "floatrl/rng.hpp"

namespace floatrl {

// Elementwise tanh via the exp form 1 - 2/(exp(2x)+1); Eigen vectorizes exp
// for doubles but not tanh. Agrees with std::tanh to machine precision and
// saturates correctly at +-inf.
void tanh_inplace(Eigen::MatrixXd& x);

// Fully connected net, tanh hidden layers, linear output. Matrices are
// (out x in); batched activations store one sample per column.
struct Mlp {
  std::vector<int> sizes;  // layer widths, input first
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases; the last
  // layer's weights are multiplied by output_scale.
  static Mlp make(const std::vector<int>& layer_sizes, Rng& rng,
                  double output_scale = 1.0);

  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
  int parameter_count() const;

  // Row-major flattening, weights then bias per layer, layers in order.
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);
};

// Post-activation values per layer from a forward pass; activations[0] is the
// input batch, activations[L] the network output.
struct MlpCache {
  std::vector<Eigen::MatrixXd> activations;
};

Eigen::MatrixXd mlp_forward(const Mlp& net, const Eigen::MatrixXd& input,
                            MlpCache* cache = nullptr);
Eigen::VectorXd mlp_forward(const Mlp& net, const Eigen::VectorXd& input);

// Reverse-mode gradient of sum_batch(output . output_grad) with respect to
// every parameter, flattened like Mlp::parameters(). input_grad, if non-null,
// receives the gradient with respect to the input batch.
Eigen::VectorXd mlp_backward(const Mlp& net, const MlpCache& cache,
                             const Eigen::MatrixXd& output_grad,
                             Eigen::MatrixXd* input_grad = nullptr);

enum class StepDirection { kAscent, kDescent };

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long long step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(int n, double learning_rate)
      : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)), lr(learning_rate) {}
};

// Bias-corrected Adam step; throws on non-finite gradients (update rejected,
// parameters untouched).
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
               AdamState& state, StepDirection direction);

// Streaming per-dimension mean/variance (Welford). apply() with no samples
// seen returns the input unchanged.
class RunningNormalizer {
 public:
  explicit RunningNormalizer(int dim);

  void update(const Eigen::VectorXd& sample);
  Eigen::VectorXd apply(const Eigen::VectorXd& sample) const;

  double count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& m2() const { return m2_; }
  Eigen::VectorXd variance() const;

  void restore(double count, const Eigen::VectorXd& mean,
               const Eigen::VectorXd& m2);

 private:
  double count_ = 0.0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd m2_;  // sum of squared deviations
};

// Diagonal-Gaussian policy over normalized actions; the environment maps
// [-1, 1] onto the actuator wrench box.
struct GaussianPolicy {
  Mlp mean_net;
  Eigen::VectorXd log_std;

  int action_dim() const { return static_cast<int>(log_std.size()); }

  // Flattened mean_net parameters with log_std appended; the unit the actor
  // optimizer updates.
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);
};

struct PolicySample {
  Eigen::VectorXd action;
  double log_prob = 0.0;
};

PolicySample policy_sample(const GaussianPolicy& p, const Eigen::VectorXd& obs,
                           Rng& rng);
double policy_log_prob(const GaussianPolicy& p, const Eigen::VectorXd& obs,
                       const Eigen::VectorXd& action);

// Mean over the batch (one observation per column) of the closed-form
// diagonal-Gaussian KL(new || old).
double policy_kl(const GaussianPolicy& p_new, const GaussianPolicy& p_old,
                 const Eigen::MatrixXd& obs_batch);

}  // namespace floatrl

#endif  // FLOATRL_NEURAL_HPP_
