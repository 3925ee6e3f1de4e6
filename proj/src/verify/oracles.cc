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

#include "verify/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace floatrl::verify {

ClosedFormState constant_wrench_closed_form(const PlatformState& initial,
                                            const BodyWrench& wrench,
                                            const PlatformParams& params,
                                            double t) {
  const bool pure_rotation = wrench.fx == 0.0 && wrench.fy == 0.0;
  const bool fixed_attitude = wrench.torque == 0.0 && initial.omega == 0.0;
  if (!pure_rotation && !fixed_attitude) {
    throw std::invalid_argument(
        "closed form requires zero force or a fixed attitude");
  }
  ClosedFormState out;
  const double alpha = wrench.torque / params.inertia;
  out.omega = initial.omega + alpha * t;
  out.theta = initial.theta + initial.omega * t + 0.5 * alpha * t * t;
  Eigen::Vector2d accel = Eigen::Vector2d::Zero();
  if (fixed_attitude) {
    accel = rotation_matrix(initial.theta) *
            Eigen::Vector2d(wrench.fx, wrench.fy) / params.mass;
  }
  const Eigen::Vector2d r0(initial.x, initial.y);
  const Eigen::Vector2d v0(initial.vx, initial.vy);
  out.velocity = v0 + accel * t;
  out.position = r0 + v0 * t + 0.5 * accel * t * t;
  return out;
}

Eigen::VectorXd mpc_stacked_least_squares(const DiscreteModel& model,
                                          const Vec6& x0,
                                          const MpcConfig& config,
                                          const MpcWeights& weights) {
  const int n = config.steps();
  const int nx = kStateDim;
  const int nu = 3;
  // Stacked prediction over x_1 .. x_n: X = S x0 + G U.
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n * nx, nx);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n * nx, n * nu);
  Mat66 apow = model.ad;
  for (int k = 0; k < n; ++k) {
    s.block(k * nx, 0, nx, nx) = apow;
    apow = model.ad * apow;
  }
  for (int k = 0; k < n; ++k) {
    Eigen::Matrix<double, 6, 3> blk = model.bd;
    for (int row = k; row < n; ++row) {
      g.block(row * nx, k * nu, nx, nu) = blk;
      blk = model.ad * blk;
    }
  }
  const double dt = config.step;
  Eigen::VectorXd w_diag(n * nx);
  Eigen::VectorXd target(n * nx);
  for (int k = 0; k < n; ++k) {
    w_diag.segment(k * nx, nx) = weights.omega * dt;
    target.segment(k * nx, nx) = config.target;
  }
  Eigen::VectorXd r_diag(n * nu);
  for (int k = 0; k < n; ++k) r_diag.segment(k * nu, nu) = weights.rho * dt;

  const Eigen::VectorXd resid = target - s * x0;
  const Eigen::MatrixXd gw = g.transpose() * w_diag.asDiagonal();
  Eigen::MatrixXd h = gw * g;
  h.diagonal() += r_diag;
  return Eigen::LDLT<Eigen::MatrixXd>(h).solve(gw * resid);
}

double mpc_objective(const DiscreteModel& model, const Vec6& x0,
                     const MpcConfig& config, const MpcWeights& weights,
                     const Eigen::VectorXd& inputs) {
  const int n = config.steps();
  if (inputs.size() != 3 * n) throw std::invalid_argument("input length");
  const double dt = config.step;
  double cost = 0.0;
  Vec6 x = x0;
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector3d u = inputs.segment<3>(3 * k);
    cost += u.dot(weights.rho.asDiagonal() * u) * dt;
    x = model.ad * x + model.bd * u;
    const Vec6 e = x - config.target;
    cost += e.dot(weights.omega.asDiagonal() * e) * dt;
  }
  return cost;
}

double pwpf_duty_euler(const PwpfParams& params, double command,
                       double fine_step, double total_time) {
  double filter = 0.0;
  bool on = false;
  long long on_steps = 0;
  const long long steps = static_cast<long long>(total_time / fine_step);
  for (long long i = 0; i < steps; ++i) {
    const double out = on ? 1.0 : 0.0;
    filter += fine_step * (params.gain * (command - out) - filter) /
              params.time_constant;
    if (!on && filter >= params.on_threshold) on = true;
    if (on && filter <= params.off_threshold) on = false;
    if (on) ++on_steps;
  }
  return static_cast<double>(on_steps) / static_cast<double>(steps);
}

Eigen::VectorXd central_difference(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (int i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double relative_error(const Eigen::VectorXd& approx,
                      const Eigen::VectorXd& reference) {
  const double scale = std::max(reference.cwiseAbs().maxCoeff(), 1e-12);
  return (approx - reference).cwiseAbs().maxCoeff() / scale;
}

McEstimate mc_gaussian_kl(const Eigen::VectorXd& mean_new,
                          const Eigen::VectorXd& std_new,
                          const Eigen::VectorXd& mean_old,
                          const Eigen::VectorXd& std_old, int samples,
                          Rng& rng) {
  const int dim = static_cast<int>(mean_new.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < samples; ++i) {
    double log_ratio = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double z = rng.normal();
      const double x = mean_new[d] + std_new[d] * z;
      const double en = (x - mean_new[d]) / std_new[d];
      const double eo = (x - mean_old[d]) / std_old[d];
      log_ratio += std::log(std_old[d] / std_new[d]) +
                   0.5 * (eo * eo - en * en);
    }
    sum += log_ratio;
    sum_sq += log_ratio * log_ratio;
  }
  McEstimate est;
  est.mean = sum / samples;
  const double var = (sum_sq - sum * sum / samples) / (samples - 1);
  est.std_error = std::sqrt(std::max(var, 0.0) / samples);
  return est;
}

double reward_arithmetic_oracle(const Eigen::Vector3d& achieved,
                                const Eigen::Vector3d& reference,
                                const Eigen::Vector3d& action, double sigma,
                                double delta, double t,
                                const RewardConfig& cfg) {
  long double total = 0.0L;
  for (int i = 0; i < 3; ++i) {
    const long double d =
        static_cast<long double>(reference[i]) - achieved[i];
    total -= static_cast<long double>(cfg.deriv_weight[i]) * d * d;
  }
  for (int i = 0; i < 3; ++i) {
    const long double a = action[i];
    total -= static_cast<long double>(cfg.effort_weight[i]) * a * a;
  }
  const long double k =
      static_cast<long double>(cfg.k0) + static_cast<long double>(cfg.k_rate) * t;
  total += cfg.psi1 / (1.0L + expl(k * delta));
  total += cfg.psi2 / (1.0L + expl(k * sigma));
  return static_cast<double>(total);
}

double forward_return(const std::vector<double>& rewards, double gamma,
                      int from) {
  double total = 0.0;
  for (std::size_t k = from; k < rewards.size(); ++k) {
    total += std::pow(gamma, static_cast<double>(k) - from) * rewards[k];
  }
  return total;
}

void two_pass_moments(const std::vector<Eigen::VectorXd>& samples,
                      Eigen::VectorXd& mean, Eigen::VectorXd& variance) {
  const int dim = static_cast<int>(samples.front().size());
  mean = Eigen::VectorXd::Zero(dim);
  for (const auto& s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  variance = Eigen::VectorXd::Zero(dim);
  for (const auto& s : samples) {
    variance += (s - mean).cwiseProduct(s - mean);
  }
  variance /= static_cast<double>(samples.size());
}

}  // namespace floatrl::verify
