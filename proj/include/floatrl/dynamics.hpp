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

#ifndef FLOATRL_DYNAMICS_HPP_
#define FLOATRL_DYNAMICS_HPP_

#include <vector>

#include <Eigen/Dense>

namespace floatrl {

inline constexpr int kStateDim = 6;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Wrap into (-pi, pi].
double wrap_angle(double a);

// Planar state, ordered [x, y, vx, vy, theta, omega].
struct PlatformState {
  double x = 0.0;      // [m]
  double y = 0.0;      // [m]
  double vx = 0.0;     // [m/s]
  double vy = 0.0;     // [m/s]
  double theta = 0.0;  // [rad], kept in (-pi, pi]
  double omega = 0.0;  // [rad/s]

  Vec6 vec() const;
  static PlatformState from_vec(const Vec6& v);
};

// Body-frame planar force plus torque about the center of mass.
struct BodyWrench {
  double fx = 0.0;      // [N]
  double fy = 0.0;      // [N]
  double torque = 0.0;  // [N m]

  Eigen::Vector3d vec() const { return {fx, fy, torque}; }
};

struct PlatformParams {
  double mass = 20.0;    // [kg]
  double inertia = 0.5;  // [kg m^2]
  double dt = 0.1;       // integration step [s]
};

struct Disturbance {
  double dvx = 0.0;     // world-frame velocity impulse [m/s]
  double dvy = 0.0;     // [m/s]
  double domega = 0.0;  // [rad/s]
};

// Body-to-world rotation for heading theta.
Eigen::Matrix2d rotation_matrix(double theta);

// Continuous-time derivative of the state under a body wrench.
Vec6 state_derivative(const PlatformState& s, const BodyWrench& w,
                      const PlatformParams& p);

// One fixed-step RK4 integration over p.dt with the wrench held constant in
// the body frame; theta is wrapped after the step.
PlatformState step(const PlatformState& s, const BodyWrench& w,
                   const PlatformParams& p);

PlatformState apply_disturbance(const PlatformState& s, const Disturbance& d);

// Fixed thruster set. Column i of wrench_matrix() is the body wrench nozzle i
// produces at full thrust.
struct ThrusterLayout {
  Eigen::Matrix2Xd position;   // [m], body frame
  Eigen::Matrix2Xd direction;  // unit thrust direction, body frame
  Eigen::VectorXd max_force;   // [N]

  int count() const { return static_cast<int>(max_force.size()); }
  Eigen::Matrix3Xd wrench_matrix() const;

  // Eight nozzles, two per corner of a square of half-width `arm`, oriented
  // so the set splits into four opposed pairs spanning both translations and
  // torque.
  static ThrusterLayout box_default(double arm = 0.25, double max_force = 1.0);
};

struct Allocation {
  Eigen::VectorXd duties;  // per nozzle, in [0, 1]
  BodyWrench achieved;     // wrench the duties actually produce
  bool saturated = false;  // request was scaled down to the attainable set
};

// Maps wrench requests to nozzle duty commands for layouts made of opposed
// pairs. The request is decomposed per pair with the minimum-norm signed
// command; an unattainable request is scaled radially, preserving direction.
class PairAllocator {
 public:
  explicit PairAllocator(const ThrusterLayout& layout);

  Allocation allocate(const BodyWrench& desired) const;

  // Sum of per-axis wrench magnitudes over the pairs; the box used to scale
  // normalized commands.
  Eigen::Vector3d axis_limits() const {
    return pair_wrench_.cwiseAbs().rowwise().sum();
  }

  int pair_count() const { return static_cast<int>(pair_pos_.size()); }

 private:
  std::vector<int> pair_pos_;  // nozzle acting when the pair command is +
  std::vector<int> pair_neg_;
  Eigen::Matrix3Xd pair_wrench_;  // full-thrust wrench of the + member
  Eigen::MatrixXd pinv_;          // min-norm right inverse of pair_wrench_
  int n_nozzles_ = 0;
};

Allocation allocate(const ThrusterLayout& layout, const BodyWrench& desired);

// Body wrench produced by per-nozzle thrust fractions (clamped to [0, 1]).
BodyWrench thruster_wrench(const ThrusterLayout& layout,
                           const Eigen::VectorXd& duties);

}  // namespace floatrl

#endif  // FLOATRL_DYNAMICS_HPP_
