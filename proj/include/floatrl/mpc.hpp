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

#ifndef FLOATRL_MPC_HPP_
#define FLOATRL_MPC_HPP_

#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "floatrl/dynamics.hpp"

namespace floatrl {

using Mat66 = Eigen::Matrix<double, 6, 6>;
using Mat63 = Eigen::Matrix<double, 6, 3>;

// Dynamics linearized by freezing the rotation matrix at the current
// attitude; everything else in the planar model is already linear.
struct LinearModel {
  Mat66 a_hat;
  Mat63 b_hat;
  double linearization_attitude = 0.0;
};

struct DiscreteModel {
  Mat66 ad;
  Mat63 bd;
  LinearModel continuous;
  double step = 0.1;
};

struct MpcWeights {
  Vec6 omega = (Vec6() << 1, 1, 100, 100, 1, 100).finished();
  Eigen::Vector3d rho = Eigen::Vector3d::Constant(1000.0);
};

struct MpcConfig {
  double horizon = 10.0;  // [s]
  double step = 0.1;      // [s]
  // Feasible state set, enforced as a soft penalty: the 5 m x 3 m room minus
  // a 0.25 m margin on position, unbounded elsewhere.
  Vec6 state_lower = (Vec6() << -2.25, -1.25, -kUnbounded, -kUnbounded,
                      -kUnbounded, -kUnbounded)
                         .finished();
  Vec6 state_upper = (Vec6() << 2.25, 1.25, kUnbounded, kUnbounded, kUnbounded,
                      kUnbounded)
                         .finished();
  // Input box, enforced exactly.
  Eigen::Vector3d input_lower{-2.0, -2.0, -1.0};
  Eigen::Vector3d input_upper{2.0, 2.0, 1.0};
  Vec6 target = Vec6::Zero();

  static constexpr double kUnbounded = std::numeric_limits<double>::infinity();

  int steps() const;
};

struct MpcSolution {
  std::vector<Eigen::Vector3d> inputs;            // u_0 .. u_{N-1}
  std::vector<Vec6> predicted_states;             // x_0 .. x_N
  std::vector<Vec6> predicted_state_derivatives;  // at k = 0 .. N-1
};

LinearModel linearize(const PlatformState& state, const PlatformParams& params);

// Exact zero-order hold; closed form because a_hat is nilpotent of index 2.
DiscreteModel discretize(const LinearModel& model, double step);

// Minimizes sum_k ||x_k - target||^2_omega * step + ||u_k||^2_rho * step over
// the horizon, subject to the discrete dynamics, the input box (clamp and
// re-solve on the active set), and the soft state bounds (iterated quadratic
// penalty). Condensed to the input variables and solved by normal equations.
MpcSolution solve(const DiscreteModel& model, const Vec6& x0,
                  const MpcConfig& config, const MpcWeights& weights);

const Vec6& reference_derivative(const MpcSolution& solution, int k);

// Per-step controller. Runs the same penalty and active-set algorithm as
// solve() but solves each inner equality-constrained problem by a backward
// value-function sweep, which is O(horizon) instead of a dense factorization.
// When omega treats x/y (and vx/vy) isotropically, the problem is posed in
// the body-aligned frame, where the dynamics are attitude-independent; a
// stabilization target additionally allows precomputed feedback gains, making
// the unconstrained case a single forward pass.
class MpcController {
 public:
  MpcController(const PlatformParams& params, const MpcConfig& config,
                const MpcWeights& weights);

  MpcSolution control(const PlatformState& current) const;

  // Reference path: linearizes at the current attitude and runs the dense
  // condensed solver. control() must agree with this to solver tolerance.
  MpcSolution solve_condensed(const PlatformState& current) const;

  const MpcConfig& config() const { return config_; }
  const MpcWeights& weights() const { return weights_; }

 private:
  PlatformParams params_;
  MpcConfig config_;
  MpcWeights weights_;
  bool rotation_reducible_ = false;
  DiscreteModel dm0_;
  // Unconstrained zero-attitude feedback gains, valid when reducible and the
  // target's position/velocity components are zero.
  bool gains_cached_ = false;
  std::vector<Eigen::Matrix<double, 3, 6>> gain_;
  std::vector<Eigen::Vector3d> offset_;
};

}  // namespace floatrl

#endif  // FLOATRL_MPC_HPP_
