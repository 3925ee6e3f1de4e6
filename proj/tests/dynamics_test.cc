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

#include <gtest/gtest.h>

#include "floatrl/rng.hpp"
#include "verify/oracles.hpp"

namespace floatrl {
namespace {

constexpr double kPi = 3.14159265358979323846;

TEST(WrapAngle, RangeAndBranches) {
  EXPECT_DOUBLE_EQ(wrap_angle(0.0), 0.0);
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(2.0 * kPi), 0.0, 1e-12);
  EXPECT_NEAR(wrap_angle(3.0 * kPi), kPi, 1e-12);
  EXPECT_NEAR(wrap_angle(-0.5), -0.5, 0.0);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(-50.0, 50.0);
    const double w = wrap_angle(a);
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
    EXPECT_NEAR(std::sin(w), std::sin(a), 1e-9);
    EXPECT_NEAR(std::cos(w), std::cos(a), 1e-9);
  }
}

TEST(RotationMatrix, OrthonormalUnitDeterminant) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(-10.0, 10.0);
    const Eigen::Matrix2d c = rotation_matrix(a);
    EXPECT_LT((c.transpose() * c - Eigen::Matrix2d::Identity())
                  .cwiseAbs()
                  .maxCoeff(),
              1e-14);
    EXPECT_NEAR(c.determinant(), 1.0, 1e-14);
  }
  EXPECT_TRUE(rotation_matrix(0.0).isApprox(Eigen::Matrix2d::Identity(), 0.0));
}

TEST(PlatformState, VecRoundTrip) {
  PlatformState s;
  s.x = 1.5;
  s.y = -0.25;
  s.vx = 0.125;
  s.vy = -2.0;
  s.theta = 0.75;
  s.omega = -0.5;
  const PlatformState back = PlatformState::from_vec(s.vec());
  EXPECT_EQ(back.x, s.x);
  EXPECT_EQ(back.y, s.y);
  EXPECT_EQ(back.vx, s.vx);
  EXPECT_EQ(back.vy, s.vy);
  EXPECT_EQ(back.theta, s.theta);
  EXPECT_EQ(back.omega, s.omega);
}

TEST(Step, ZeroWrenchConservesMomentum) {
  const PlatformParams params;
  PlatformState s;
  s.vx = 0.4;
  s.vy = -0.2;
  s.omega = 1.3;
  s.theta = 0.5;
  for (int k = 0; k < 500; ++k) {
    s = step(s, BodyWrench{}, params);
    EXPECT_NEAR(s.vx, 0.4, 1e-12);
    EXPECT_NEAR(s.vy, -0.2, 1e-12);
    EXPECT_NEAR(s.omega, 1.3, 1e-12);
  }
}

TEST(Step, ConstantForceMatchesClosedForm) {
  const PlatformParams params;
  PlatformState s;
  s.theta = 0.9;
  s.vx = 0.1;
  s.vy = -0.05;
  const PlatformState s0 = s;
  BodyWrench w;
  w.fx = 0.8;
  w.fy = -0.3;
  for (int k = 0; k < 100; ++k) s = step(s, w, params);
  const verify::ClosedFormState cf =
      verify::constant_wrench_closed_form(s0, w, params, 10.0);
  EXPECT_NEAR(s.x, cf.position.x(), 1e-10);
  EXPECT_NEAR(s.y, cf.position.y(), 1e-10);
  EXPECT_NEAR(s.vx, cf.velocity.x(), 1e-12);
  EXPECT_NEAR(s.vy, cf.velocity.y(), 1e-12);
  EXPECT_EQ(s.theta, s0.theta);
}

TEST(Step, ConstantTorqueMatchesClosedForm) {
  const PlatformParams params;
  PlatformState s;
  s.omega = 0.2;
  const PlatformState s0 = s;
  BodyWrench w;
  w.torque = 0.4;
  for (int k = 0; k < 100; ++k) s = step(s, w, params);
  const verify::ClosedFormState cf =
      verify::constant_wrench_closed_form(s0, w, params, 10.0);
  EXPECT_NEAR(wrap_angle(s.theta - cf.theta), 0.0, 1e-10);
  EXPECT_NEAR(s.omega, cf.omega, 1e-12);
}

TEST(Step, ThetaStaysWrapped) {
  const PlatformParams params;
  PlatformState s;
  s.omega = 2.0;
  BodyWrench w;
  w.torque = 0.3;
  for (int k = 0; k < 2000; ++k) {
    s = step(s, w, params);
    ASSERT_GT(s.theta, -kPi);
    ASSERT_LE(s.theta, kPi);
  }
}

// Halving the step should shrink the error against a fine-step reference by
// about 2^4.
TEST(Step, FourthOrderConvergence) {
  PlatformState s;
  s.theta = 0.3;
  s.omega = 0.7;
  s.vx = 0.2;
  BodyWrench w;
  w.fx = 1.0;
  w.fy = 0.5;
  w.torque = 0.2;

  auto integrate = [&](double dt, double total) {
    PlatformParams p;
    p.dt = dt;
    PlatformState out = s;
    const int n = static_cast<int>(std::round(total / dt));
    for (int k = 0; k < n; ++k) out = step(out, w, p);
    return out;
  };
  const PlatformState fine = integrate(1e-4, 2.0);
  const PlatformState coarse = integrate(0.1, 2.0);
  const PlatformState half = integrate(0.05, 2.0);
  const double err_coarse =
      (coarse.vec().head<4>() - fine.vec().head<4>()).norm();
  const double err_half = (half.vec().head<4>() - fine.vec().head<4>()).norm();
  EXPECT_GT(err_coarse / err_half, 8.0);
  EXPECT_LT(err_coarse / err_half, 40.0);
}

TEST(ApplyDisturbance, AddsVelocityImpulse) {
  PlatformState s;
  s.vx = 0.1;
  s.omega = -0.05;
  Disturbance d;
  d.dvx = 0.15;
  d.dvy = -0.1;
  d.domega = 0.2;
  const PlatformState out = apply_disturbance(s, d);
  EXPECT_DOUBLE_EQ(out.vx, 0.25);
  EXPECT_DOUBLE_EQ(out.vy, -0.1);
  EXPECT_DOUBLE_EQ(out.omega, 0.15);
  EXPECT_EQ(out.x, s.x);
  EXPECT_EQ(out.theta, s.theta);
}

TEST(ThrusterLayout, BoxDefaultGeometry) {
  const ThrusterLayout layout = ThrusterLayout::box_default();
  EXPECT_EQ(layout.count(), 8);
  EXPECT_EQ(layout.wrench_matrix().cols(), 8);
  for (int i = 0; i < layout.count(); ++i) {
    EXPECT_NEAR(layout.direction.col(i).norm(), 1.0, 1e-14);
    EXPECT_DOUBLE_EQ(layout.max_force[i], 1.0);
    EXPECT_NEAR(layout.position.col(i).cwiseAbs().maxCoeff(), 0.25, 1e-14);
  }
  // All nozzles firing at once cancel: opposed pairs.
  const BodyWrench all =
      thruster_wrench(layout, Eigen::VectorXd::Ones(8));
  EXPECT_NEAR(all.fx, 0.0, 1e-12);
  EXPECT_NEAR(all.fy, 0.0, 1e-12);
  EXPECT_NEAR(all.torque, 0.0, 1e-12);
}

TEST(ThrusterWrench, ClampsDuties) {
  const ThrusterLayout layout = ThrusterLayout::box_default();
  Eigen::VectorXd duties = Eigen::VectorXd::Zero(8);
  duties[0] = 2.0;   // clamped to 1
  duties[1] = -0.5;  // clamped to 0
  const BodyWrench clamped = thruster_wrench(layout, duties);
  duties[0] = 1.0;
  duties[1] = 0.0;
  const BodyWrench exact = thruster_wrench(layout, duties);
  EXPECT_DOUBLE_EQ(clamped.fx, exact.fx);
  EXPECT_DOUBLE_EQ(clamped.fy, exact.fy);
  EXPECT_DOUBLE_EQ(clamped.torque, exact.torque);
}

TEST(PairAllocator, ReproducesAttainableWrench) {
  const ThrusterLayout layout = ThrusterLayout::box_default();
  const PairAllocator allocator(layout);
  Rng rng(3);
  const Eigen::Vector3d limits = allocator.axis_limits();
  for (int i = 0; i < 200; ++i) {
    BodyWrench desired;
    desired.fx = rng.uniform(-limits[0], limits[0]) * 0.45;
    desired.fy = rng.uniform(-limits[1], limits[1]) * 0.45;
    desired.torque = rng.uniform(-limits[2], limits[2]) * 0.45;
    const Allocation a = allocator.allocate(desired);
    ASSERT_FALSE(a.saturated);
    EXPECT_GE(a.duties.minCoeff(), 0.0);
    EXPECT_LE(a.duties.maxCoeff(), 1.0);
    const BodyWrench produced = thruster_wrench(layout, a.duties);
    EXPECT_NEAR(produced.fx, desired.fx, 1e-9);
    EXPECT_NEAR(produced.fy, desired.fy, 1e-9);
    EXPECT_NEAR(produced.torque, desired.torque, 1e-9);
    EXPECT_NEAR(a.achieved.fx, desired.fx, 1e-9);
  }
}

TEST(PairAllocator, SaturatesRadially) {
  const ThrusterLayout layout = ThrusterLayout::box_default();
  const PairAllocator allocator(layout);
  BodyWrench desired;
  desired.fx = 10.0;
  desired.fy = 4.0;
  desired.torque = 2.0;
  const Allocation a = allocator.allocate(desired);
  EXPECT_TRUE(a.saturated);
  EXPECT_GE(a.duties.minCoeff(), 0.0);
  EXPECT_LE(a.duties.maxCoeff(), 1.0);
  // Direction preserved: achieved is a positive multiple of the request.
  const Eigen::Vector3d want(desired.fx, desired.fy, desired.torque);
  const Eigen::Vector3d got = a.achieved.vec();
  const double scale = got.norm() / want.norm();
  EXPECT_GT(scale, 0.0);
  EXPECT_LT(scale, 1.0);
  EXPECT_LT((got - scale * want).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(PairAllocator, AxisLimitsMatchLayout) {
  const PairAllocator allocator(ThrusterLayout::box_default());
  const Eigen::Vector3d limits = allocator.axis_limits();
  EXPECT_NEAR(limits[0], 2.0, 1e-12);
  EXPECT_NEAR(limits[1], 2.0, 1e-12);
  EXPECT_NEAR(limits[2], 1.0, 1e-12);
}

TEST(StateDerivative, MatchesManualForm) {
  const PlatformParams params;
  PlatformState s;
  s.vx = 0.3;
  s.vy = -0.1;
  s.theta = 0.6;
  s.omega = 0.25;
  BodyWrench w;
  w.fx = 0.7;
  w.fy = -0.2;
  w.torque = 0.15;
  const Vec6 d = state_derivative(s, w, params);
  const Eigen::Vector2d accel =
      rotation_matrix(s.theta) * Eigen::Vector2d(w.fx, w.fy) / params.mass;
  EXPECT_DOUBLE_EQ(d[0], s.vx);
  EXPECT_DOUBLE_EQ(d[1], s.vy);
  EXPECT_NEAR(d[2], accel.x(), 1e-15);
  EXPECT_NEAR(d[3], accel.y(), 1e-15);
  EXPECT_DOUBLE_EQ(d[4], s.omega);
  EXPECT_DOUBLE_EQ(d[5], w.torque / params.inertia);
}

}  // namespace
}  // namespace floatrl
