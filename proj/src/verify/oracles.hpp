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

#ifndef FLOATRL_VERIFY_ORACLES_HPP_
#define FLOATRL_VERIFY_ORACLES_HPP_

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "floatrl/dynamics.hpp"
#include "floatrl/mpc.hpp"
#include "floatrl/pwpf.hpp"
#include "floatrl/reward.hpp"
#include "floatrl/rng.hpp"

// Independent reference implementations used to check the production code.
// Each one recomputes a quantity from first principles along a different
// code path than the module under test.
namespace floatrl::verify {

// Trajectory under a constant body wrench in the two closed-form regimes:
// zero torque with zero initial rate (fixed attitude, constant acceleration)
// or zero force (linear drift plus quadratic attitude). theta is returned
// unwrapped.
struct ClosedFormState {
  Eigen::Vector2d position;
  Eigen::Vector2d velocity;
  double theta = 0.0;  // unwrapped
  double omega = 0.0;
};
ClosedFormState constant_wrench_closed_form(const PlatformState& initial,
                                            const BodyWrench& wrench,
                                            const PlatformParams& params,
                                            double t);

// Unconstrained horizon tracking solved as one batch least-squares problem:
// stacks the predicted states into X = S x0 + G U and factors the normal
// equations of the stacked quadratic. Returns the 3N input vector.
Eigen::VectorXd mpc_stacked_least_squares(const DiscreteModel& model,
                                          const Vec6& x0,
                                          const MpcConfig& config,
                                          const MpcWeights& weights);

// Tracking objective of an arbitrary input sequence rolled out through the
// discrete dynamics (state-bound penalties excluded).
double mpc_objective(const DiscreteModel& model, const Vec6& x0,
                     const MpcConfig& config, const MpcWeights& weights,
                     const Eigen::VectorXd& inputs);

// Long-run on fraction of the modulator from a plain forward-Euler
// simulation of the filter and trigger at step fine_step.
double pwpf_duty_euler(const PwpfParams& params, double command,
                       double fine_step, double total_time);

// Central finite differences of f at x.
Eigen::VectorXd central_difference(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h);

// Max-norm disagreement relative to the reference magnitude, floored so a
// near-zero reference cannot blow up the ratio.
double relative_error(const Eigen::VectorXd& approx,
                      const Eigen::VectorXd& reference);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// KL(new || old) between diagonal Gaussians estimated by Monte Carlo.
McEstimate mc_gaussian_kl(const Eigen::VectorXd& mean_new,
                          const Eigen::VectorXd& std_new,
                          const Eigen::VectorXd& mean_old,
                          const Eigen::VectorXd& std_old, int samples,
                          Rng& rng);

// The per-step reward recomputed term by term in extended precision.
double reward_arithmetic_oracle(const Eigen::Vector3d& achieved,
                                const Eigen::Vector3d& reference,
                                const Eigen::Vector3d& action, double sigma,
                                double delta, double t,
                                const RewardConfig& cfg);

// Discounted return by forward power summation.
double forward_return(const std::vector<double>& rewards, double gamma,
                      int from);

// Batch mean and (population) variance by the two-pass formula.
void two_pass_moments(const std::vector<Eigen::VectorXd>& samples,
                      Eigen::VectorXd& mean, Eigen::VectorXd& variance);

}  // namespace floatrl::verify

#endif  // FLOATRL_VERIFY_ORACLES_HPP_
