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

#include "floatrl/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace floatrl {

double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  const double w = std::remainder(a, 2.0 * pi);
  return (w <= -pi) ? w + 2.0 * pi : w;
}

Vec6 PlatformState::vec() const {
  Vec6 v;
  v << x, y, vx, vy, theta, omega;
  return v;
}

PlatformState PlatformState::from_vec(const Vec6& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

Eigen::Matrix2d rotation_matrix(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d m;
  m << c, -s, s, c;
  return m;
}

Vec6 state_derivative(const PlatformState& s, const BodyWrench& w,
                      const PlatformParams& p) {
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  Vec6 d;
  d[0] = s.vx;
  d[1] = s.vy;
  d[2] = (c * w.fx - sn * w.fy) / p.mass;
  d[3] = (sn * w.fx + c * w.fy) / p.mass;
  d[4] = s.omega;
  d[5] = w.torque / p.inertia;
  return d;
}

PlatformState step(const PlatformState& s, const BodyWrench& w,
                   const PlatformParams& p) {
  const Vec6 s0 = s.vec();
  const auto f = [&](const Vec6& v) {
    return state_derivative(PlatformState::from_vec(v), w, p);
  };
  const double dt = p.dt;
  const Vec6 k1 = f(s0);
  const Vec6 k2 = f(s0 + 0.5 * dt * k1);
  const Vec6 k3 = f(s0 + 0.5 * dt * k2);
  const Vec6 k4 = f(s0 + dt * k3);
  Vec6 s1 = s0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  s1[4] = wrap_angle(s1[4]);
  return PlatformState::from_vec(s1);
}

PlatformState apply_disturbance(const PlatformState& s, const Disturbance& d) {
  PlatformState out = s;
  out.vx += d.dvx;
  out.vy += d.dvy;
  out.omega += d.domega;
  return out;
}

Eigen::Matrix3Xd ThrusterLayout::wrench_matrix() const {
  const int n = count();
  Eigen::Matrix3Xd w(3, n);
  for (int i = 0; i < n; ++i) {
    const double f = max_force[i];
    w(0, i) = f * direction(0, i);
    w(1, i) = f * direction(1, i);
    w(2, i) = f * (position(0, i) * direction(1, i) -
                   position(1, i) * direction(0, i));
  }
  return w;
}

ThrusterLayout ThrusterLayout::box_default(double arm, double max_force) {
  ThrusterLayout l;
  l.position.resize(2, 8);
  l.direction.resize(2, 8);
  l.max_force = Eigen::VectorXd::Constant(8, max_force);
  // Two nozzles per corner, ordered counterclockwise from (+,+). Each fires
  // along one face so every nozzle has an exact opposite across the body.
  const double px[8] = {+arm, +arm, -arm, -arm, -arm, -arm, +arm, +arm};
  const double py[8] = {+arm, +arm, +arm, +arm, -arm, -arm, -arm, -arm};
  const double dx[8] = {-1, 0, +1, 0, +1, 0, -1, 0};
  const double dy[8] = {0, -1, 0, -1, 0, +1, 0, +1};
  for (int i = 0; i < 8; ++i) {
    l.position(0, i) = px[i];
    l.position(1, i) = py[i];
    l.direction(0, i) = dx[i];
    l.direction(1, i) = dy[i];
  }
  return l;
}

PairAllocator::PairAllocator(const ThrusterLayout& layout)
    : n_nozzles_(layout.count()) {
  const Eigen::Matrix3Xd w = layout.wrench_matrix();
  std::vector<bool> used(n_nozzles_, false);
  for (int i = 0; i < n_nozzles_; ++i) {
    if (used[i]) continue;
    int partner = -1;
    for (int j = i + 1; j < n_nozzles_; ++j) {
      if (!used[j] && (w.col(i) + w.col(j)).norm() < 1e-9) {
        partner = j;
        break;
      }
    }
    if (partner < 0) {
      throw std::invalid_argument(
          "thruster layout does not decompose into opposed pairs");
    }
    used[i] = used[partner] = true;
    pair_pos_.push_back(i);
    pair_neg_.push_back(partner);
  }
  const int np = pair_count();
  pair_wrench_.resize(3, np);
  for (int p = 0; p < np; ++p) pair_wrench_.col(p) = w.col(pair_pos_[p]);
  pinv_ = pair_wrench_.completeOrthogonalDecomposition().pseudoInverse();
}

Allocation PairAllocator::allocate(const BodyWrench& desired) const {
  Eigen::VectorXd z = pinv_ * desired.vec();
  Allocation out;
  out.saturated = false;
  const double peak = z.cwiseAbs().maxCoeff();
  if (peak > 1.0) {
    z /= peak;
    out.saturated = true;
  }
  out.duties = Eigen::VectorXd::Zero(n_nozzles_);
  for (int p = 0; p < pair_count(); ++p) {
    if (z[p] >= 0.0) {
      out.duties[pair_pos_[p]] = z[p];
    } else {
      out.duties[pair_neg_[p]] = -z[p];
    }
  }
  const Eigen::Vector3d achieved = pair_wrench_ * z;
  out.achieved = {achieved[0], achieved[1], achieved[2]};
  return out;
}

Allocation allocate(const ThrusterLayout& layout, const BodyWrench& desired) {
  return PairAllocator(layout).allocate(desired);
}

BodyWrench thruster_wrench(const ThrusterLayout& layout,
                           const Eigen::VectorXd& duties) {
  if (duties.size() != layout.count()) {
    throw std::invalid_argument("duty vector length mismatch");
  }
  const Eigen::VectorXd d = duties.cwiseMax(0.0).cwiseMin(1.0);
  const Eigen::Vector3d w = layout.wrench_matrix() * d;
  return {w[0], w[1], w[2]};
}

}  // namespace floatrl
