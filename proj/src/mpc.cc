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

#include "floatrl/mpc.hpp"

#include <cmath>
#include <stdexcept>

namespace floatrl {
namespace {

constexpr double kBoundTol = 1e-9;
constexpr int kMaxPenaltyIters = 3;

void validate_problem(const MpcConfig& config, const MpcWeights& weights) {
  if ((weights.omega.array() <= 0.0).any() ||
      (weights.rho.array() <= 0.0).any()) {
    throw std::invalid_argument("mpc weights must be positive definite");
  }
  if ((config.state_lower.array() > config.state_upper.array()).any() ||
      (config.input_lower.array() > config.input_upper.array()).any()) {
    throw std::invalid_argument("mpc bounds are infeasible (lower > upper)");
  }
  config.steps();
}

std::vector<Mat63> reachability(const Mat66& ad, const Mat63& bd, int n) {
  std::vector<Mat63> m(n);
  m[0] = bd;
  for (int i = 1; i < n; ++i) m[i] = ad * m[i - 1];
  return m;
}

// H = step * (G' W G + rho), with G the block-lower-triangular prediction map
// G[k][j] = Ad^(k-1-j) Bd. Uniform stage weights collapse each block
// diagonal to a running suffix sum, so assembly is O(N^2) blocks total.
Eigen::MatrixXd assemble_h_uniform(const std::vector<Mat63>& m, const Vec6& w,
                                   const Eigen::Vector3d& rho, double dt) {
  const int n = static_cast<int>(m.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (int d = 0; d < n; ++d) {
    Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
    for (int c = 1; c <= n - d; ++c) {
      s += m[c - 1 + d].transpose() * w.asDiagonal() * m[c - 1];
      const int j2 = n - c;
      const int j1 = j2 - d;
      h.block<3, 3>(3 * j1, 3 * j2) = dt * s;
      if (d > 0) h.block<3, 3>(3 * j2, 3 * j1) = dt * s.transpose();
    }
  }
  for (int j = 0; j < n; ++j) {
    h.block<3, 3>(3 * j, 3 * j) += dt * rho.asDiagonal();
  }
  return h;
}

// Stage-varying weights (active state penalties) forbid the suffix-sum
// collapse; sum each block directly.
Eigen::MatrixXd assemble_h_stagewise(const std::vector<Mat63>& m,
                                     const std::vector<Vec6>& w_stage,
                                     const Eigen::Vector3d& rho, double dt) {
  const int n = static_cast<int>(m.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (int j1 = 0; j1 < n; ++j1) {
    for (int j2 = j1; j2 < n; ++j2) {
      Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
      for (int k = j2 + 1; k <= n; ++k) {
        s += m[k - 1 - j1].transpose() * w_stage[k - 1].asDiagonal() *
             m[k - 1 - j2];
      }
      h.block<3, 3>(3 * j1, 3 * j2) = dt * s;
      if (j2 > j1) h.block<3, 3>(3 * j2, 3 * j1) = dt * s.transpose();
    }
  }
  for (int j = 0; j < n; ++j) {
    h.block<3, 3>(3 * j, 3 * j) += dt * rho.asDiagonal();
  }
  return h;
}

// g = step * G' W (f - target), via the adjoint recursion
// psi_k = q_k + Ad' psi_{k+1}, g_j = Bd' psi_{j+1}.
Eigen::VectorXd assemble_g(const Mat66& ad, const Mat63& bd, const Vec6& x0,
                           const std::vector<Vec6>& w_stage,
                           const std::vector<Vec6>& t_stage, double dt) {
  const int n = static_cast<int>(w_stage.size());
  std::vector<Vec6> q(n);
  Vec6 f = x0;
  for (int k = 1; k <= n; ++k) {
    f = ad * f;
    q[k - 1] =
        (dt * w_stage[k - 1].array() * (f - t_stage[k - 1]).array()).matrix();
  }
  Eigen::VectorXd g(3 * n);
  Vec6 psi = Vec6::Zero();
  for (int k = n; k >= 1; --k) {
    psi = q[k - 1] + (k < n ? Vec6(ad.transpose() * psi) : Vec6::Zero());
    g.segment<3>(3 * (k - 1)) = bd.transpose() * psi;
  }
  return g;
}

std::vector<Vec6> rollout(const Mat66& ad, const Mat63& bd, const Vec6& x0,
                          const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size()) / 3;
  std::vector<Vec6> x(n + 1);
  x[0] = x0;
  for (int k = 0; k < n; ++k) {
    x[k + 1] = ad * x[k] + bd * u.segment<3>(3 * k);
  }
  return x;
}

// Minimizes u'Hu + 2g'u subject to the per-component input box via clamp and
// re-solve on the active set, with KKT-sign release of wrongly clamped
// variables. full_llt, when given, factors H and serves the all-free solve.
Eigen::VectorXd solve_box(const Eigen::MatrixXd& h, const Eigen::VectorXd& g,
                          const Eigen::Vector3d& lo, const Eigen::Vector3d& hi,
                          const Eigen::LLT<Eigen::MatrixXd>* full_llt) {
  const int n = static_cast<int>(g.size());
  const auto lo_of = [&](int i) { return lo[i % 3]; };
  const auto hi_of = [&](int i) { return hi[i % 3]; };

  Eigen::VectorXd u = full_llt ? full_llt->solve(-g)
                               : Eigen::LLT<Eigen::MatrixXd>(h).solve(-g);
  std::vector<int> at(n, 0);  // 0 free, +1 upper, -1 lower
  bool any_clamped = false;

  const auto resolve = [&]() {
    std::vector<int> free;
    free.reserve(n);
    for (int i = 0; i < n; ++i) {
      if (at[i] == 0) free.push_back(i);
    }
    const int nf = static_cast<int>(free.size());
    if (nf == n) {
      u = full_llt ? full_llt->solve(-g)
                   : Eigen::LLT<Eigen::MatrixXd>(h).solve(-g);
      return;
    }
    for (int i = 0; i < n; ++i) {
      if (at[i] > 0) u[i] = hi_of(i);
      if (at[i] < 0) u[i] = lo_of(i);
    }
    if (nf == 0) return;
    Eigen::MatrixXd hff(nf, nf);
    Eigen::VectorXd rhs(nf);
    for (int a = 0; a < nf; ++a) {
      rhs[a] = -g[free[a]];
      for (int b = 0; b < nf; ++b) hff(a, b) = h(free[a], free[b]);
    }
    for (int i = 0; i < n; ++i) {
      if (at[i] == 0) continue;
      for (int a = 0; a < nf; ++a) rhs[a] -= h(free[a], i) * u[i];
    }
    const Eigen::VectorXd uf = Eigen::LLT<Eigen::MatrixXd>(hff).solve(rhs);
    for (int a = 0; a < nf; ++a) u[free[a]] = uf[a];
  };

  for (int iter = 0; iter < 2 * n + 10; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      if (at[i] != 0) continue;
      if (u[i] > hi_of(i) + kBoundTol) {
        at[i] = 1;
        changed = any_clamped = true;
      } else if (u[i] < lo_of(i) - kBoundTol) {
        at[i] = -1;
        changed = any_clamped = true;
      }
    }
    if (!changed) {
      if (!any_clamped) break;
      const Eigen::VectorXd grad = h * u + g;
      for (int i = 0; i < n; ++i) {
        if ((at[i] > 0 && grad[i] > kBoundTol) ||
            (at[i] < 0 && grad[i] < -kBoundTol)) {
          at[i] = 0;
          changed = true;
        }
      }
      if (!changed) break;
    }
    resolve();
  }
  for (int i = 0; i < n; ++i) {
    u[i] = std::min(std::max(u[i], lo_of(i)), hi_of(i));
  }
  return u;
}

MpcSolution build_solution(const DiscreteModel& dm, const Vec6& x0,
                           const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size()) / 3;
  MpcSolution sol;
  sol.inputs.resize(n);
  sol.predicted_state_derivatives.resize(n);
  sol.predicted_states = rollout(dm.ad, dm.bd, x0, u);
  for (int k = 0; k < n; ++k) {
    sol.inputs[k] = u.segment<3>(3 * k);
    sol.predicted_state_derivatives[k] =
        dm.continuous.a_hat * sol.predicted_states[k] +
        dm.continuous.b_hat * sol.inputs[k];
  }
  return sol;
}

// Merges a quadratic penalty mu*(x_c - bound)^2 into the diagonal stage cost:
// w(x-t)^2 + mu(x-b)^2 = (w+mu)(x-t')^2 + const.
void add_penalty(double mu, double bound, double& w, double& t) {
  const double merged = (w * t + mu * bound) / (w + mu);
  w += mu;
  t = merged;
}

// ---- Sweep-based path (MpcController) ----
//
// The same objective written stagewise, x' p x - 2 r' x per stage k = 1..N
// plus dt * u' rho u per input, admits a backward value-function recursion
// whose per-stage work is a 3x3 solve. Penalties enter as rank-1 updates to
// p, so non-axis-aligned bounds (the position box seen from the body frame)
// cost nothing extra.

struct StageCost {
  Mat66 p = Mat66::Zero();
  Vec6 r = Vec6::Zero();
};

std::vector<StageCost> uniform_stage_costs(const Vec6& omega,
                                           const Vec6& target, double dt,
                                           int n) {
  StageCost c;
  c.p = (dt * omega).asDiagonal();
  c.r = (dt * omega.array() * target.array()).matrix();
  return std::vector<StageCost>(n, c);
}

struct AffinePolicy {
  std::vector<Eigen::Matrix<double, 3, 6>> gain;    // u_k = -gain x + offset
  std::vector<Eigen::Vector3d> offset;
};

// Active-set flags per stage and input component: 0 free, +1 upper, -1 lower.
using ActiveFlags = std::vector<std::array<int, 3>>;

// Exact solve with clamped components held at their bounds. V_k(x) =
// x' S x - 2 c' x; free components minimize, clamped enter as constants.
AffinePolicy backward_sweep(const Mat66& ad, const Mat63& bd,
                            const std::vector<StageCost>& cost,
                            const Eigen::Vector3d& rho_dt,
                            const ActiveFlags* at, const Eigen::Vector3d& lo,
                            const Eigen::Vector3d& hi) {
  const int n = static_cast<int>(cost.size());
  AffinePolicy policy;
  policy.gain.resize(n);
  policy.offset.resize(n);
  Mat66 s = cost[n - 1].p;
  Vec6 c = cost[n - 1].r;
  for (int k = n - 1; k >= 0; --k) {
    const Eigen::Matrix3d kk =
        bd.transpose() * s * bd + Eigen::Matrix3d(rho_dt.asDiagonal());
    const Eigen::Matrix<double, 3, 6> l = bd.transpose() * s * ad;
    const Eigen::Vector3d m = bd.transpose() * c;

    Eigen::Matrix<double, 3, 6>& g = policy.gain[k];
    Eigen::Vector3d& d = policy.offset[k];
    int free_idx[3];
    int nf = 0;
    for (int i = 0; i < 3; ++i) {
      const int flag = at ? (*at)[k][i] : 0;
      if (flag == 0) {
        free_idx[nf++] = i;
      } else {
        g.row(i).setZero();
        d[i] = flag > 0 ? hi[i] : lo[i];
      }
    }
    if (nf == 3) {
      const Eigen::LLT<Eigen::Matrix3d> llt(kk);
      g = llt.solve(l);
      d = llt.solve(m);
    } else if (nf > 0) {
      Eigen::MatrixXd kff(nf, nf);
      Eigen::MatrixXd lf(nf, 6);
      Eigen::VectorXd mf(nf);
      for (int a = 0; a < nf; ++a) {
        mf[a] = m[free_idx[a]];
        lf.row(a) = l.row(free_idx[a]);
        for (int b = 0; b < nf; ++b) kff(a, b) = kk(free_idx[a], free_idx[b]);
        for (int i = 0; i < 3; ++i) {
          const int flag = at ? (*at)[k][i] : 0;
          if (flag != 0) mf[a] -= kk(free_idx[a], i) * d[i];
        }
      }
      const Eigen::LLT<Eigen::MatrixXd> llt(kff);
      const Eigen::MatrixXd gf = llt.solve(lf);
      const Eigen::VectorXd df = llt.solve(mf);
      for (int a = 0; a < nf; ++a) {
        g.row(free_idx[a]) = gf.row(a);
        d[free_idx[a]] = df[a];
      }
    }

    const Mat66 acl = ad - bd * g;
    const Vec6 e = bd * d;
    Mat66 s_next = acl.transpose() * s * acl +
                   g.transpose() * rho_dt.asDiagonal() * g;
    Vec6 c_next = g.transpose() * (rho_dt.asDiagonal() * d) +
                  acl.transpose() * (c - s * e);
    if (k >= 1) {
      s_next += cost[k - 1].p;
      c_next += cost[k - 1].r;
    }
    s = 0.5 * (s_next + s_next.transpose());
    c = c_next;
  }
  return policy;
}

struct SweepSolution {
  Eigen::VectorXd u;
  std::vector<Vec6> states;
};

SweepSolution forward_pass(const Mat66& ad, const Mat63& bd, const Vec6& x0,
                           const std::vector<Eigen::Matrix<double, 3, 6>>& gain,
                           const std::vector<Eigen::Vector3d>& offset) {
  const int n = static_cast<int>(gain.size());
  SweepSolution sol;
  sol.u.resize(3 * n);
  sol.states.resize(n + 1);
  sol.states[0] = x0;
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector3d u = offset[k] - gain[k] * sol.states[k];
    sol.u.segment<3>(3 * k) = u;
    sol.states[k + 1] = ad * sol.states[k] + bd * u;
  }
  return sol;
}

// Objective gradient (H u + g of the condensed form) via the costate
// recursion, for the KKT release test.
Eigen::VectorXd adjoint_gradient(const Mat66& ad, const Mat63& bd,
                                 const std::vector<StageCost>& cost,
                                 const Eigen::Vector3d& rho_dt,
                                 const SweepSolution& sol) {
  const int n = static_cast<int>(cost.size());
  Eigen::VectorXd grad(3 * n);
  Vec6 psi = Vec6::Zero();
  for (int k = n; k >= 1; --k) {
    const Vec6 z = cost[k - 1].p * sol.states[k] - cost[k - 1].r;
    psi = (k < n) ? Vec6(z + ad.transpose() * psi) : z;
    grad.segment<3>(3 * (k - 1)) =
        bd.transpose() * psi +
        (rho_dt.array() * sol.u.segment<3>(3 * (k - 1)).array()).matrix();
  }
  return grad;
}

// Same clamp-and-resolve loop as solve_box, with each equality-constrained
// subproblem solved by a sweep.
SweepSolution solve_box_sweep(const Mat66& ad, const Mat63& bd, const Vec6& x0,
                              const std::vector<StageCost>& cost,
                              const Eigen::Vector3d& rho_dt,
                              const Eigen::Vector3d& lo,
                              const Eigen::Vector3d& hi) {
  const int n = static_cast<int>(cost.size());
  ActiveFlags at(n, {0, 0, 0});
  bool any_clamped = false;
  const AffinePolicy first =
      backward_sweep(ad, bd, cost, rho_dt, nullptr, lo, hi);
  SweepSolution sol = forward_pass(ad, bd, x0, first.gain, first.offset);

  for (int iter = 0; iter < 6 * n + 10; ++iter) {
    bool changed = false;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < 3; ++i) {
        if (at[k][i] != 0) continue;
        const double v = sol.u[3 * k + i];
        if (v > hi[i] + kBoundTol) {
          at[k][i] = 1;
          changed = any_clamped = true;
        } else if (v < lo[i] - kBoundTol) {
          at[k][i] = -1;
          changed = any_clamped = true;
        }
      }
    }
    if (!changed) {
      if (!any_clamped) break;
      const Eigen::VectorXd grad = adjoint_gradient(ad, bd, cost, rho_dt, sol);
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < 3; ++i) {
          if ((at[k][i] > 0 && grad[3 * k + i] > kBoundTol) ||
              (at[k][i] < 0 && grad[3 * k + i] < -kBoundTol)) {
            at[k][i] = 0;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    const AffinePolicy next =
        backward_sweep(ad, bd, cost, rho_dt, &at, lo, hi);
    sol = forward_pass(ad, bd, x0, next.gain, next.offset);
  }
  bool reclamped = false;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < 3; ++i) {
      double& v = sol.u[3 * k + i];
      const double clamped = std::min(std::max(v, lo[i]), hi[i]);
      if (clamped != v) {
        v = clamped;
        reclamped = true;
      }
    }
  }
  if (reclamped) sol.states = rollout(ad, bd, x0, sol.u);
  return sol;
}

}  // namespace

int MpcConfig::steps() const {
  if (step <= 0.0 || horizon <= 0.0) {
    throw std::invalid_argument("mpc horizon and step must be positive");
  }
  const double ratio = horizon / step;
  const int n = static_cast<int>(std::lround(ratio));
  if (n < 1 || std::abs(ratio - n) > 1e-9) {
    throw std::invalid_argument(
        "mpc horizon must be a positive integer multiple of the step");
  }
  return n;
}

LinearModel linearize(const PlatformState& state,
                      const PlatformParams& params) {
  LinearModel m;
  m.a_hat.setZero();
  m.a_hat(0, 2) = 1.0;
  m.a_hat(1, 3) = 1.0;
  m.a_hat(4, 5) = 1.0;
  m.b_hat.setZero();
  m.b_hat.block<2, 2>(2, 0) = rotation_matrix(state.theta) / params.mass;
  m.b_hat(5, 2) = 1.0 / params.inertia;
  m.linearization_attitude = state.theta;
  return m;
}

DiscreteModel discretize(const LinearModel& model, double step) {
  if (step < 0.0) throw std::invalid_argument("negative discretization step");
  DiscreteModel dm;
  dm.continuous = model;
  dm.step = step;
  dm.ad = Mat66::Identity() + step * model.a_hat;
  dm.bd = step * model.b_hat + (step * step / 2.0) * (model.a_hat * model.b_hat);
  return dm;
}

MpcSolution solve(const DiscreteModel& model, const Vec6& x0,
                  const MpcConfig& config, const MpcWeights& weights) {
  validate_problem(config, weights);
  const int n = config.steps();
  const double dt = config.step;
  const std::vector<Mat63> m = reachability(model.ad, model.bd, n);

  std::vector<Vec6> w_stage(n, weights.omega);
  std::vector<Vec6> t_stage(n, config.target);
  Eigen::VectorXd u;
  for (int iter = 0;; ++iter) {
    const Eigen::MatrixXd h =
        (iter == 0) ? assemble_h_uniform(m, weights.omega, weights.rho, dt)
                    : assemble_h_stagewise(m, w_stage, weights.rho, dt);
    const Eigen::VectorXd g =
        assemble_g(model.ad, model.bd, x0, w_stage, t_stage, dt);
    u = solve_box(h, g, config.input_lower, config.input_upper, nullptr);

    if (iter >= kMaxPenaltyIters) break;
    const std::vector<Vec6> x = rollout(model.ad, model.bd, x0, u);
    const double mu = 1e4 * std::pow(10.0, iter);
    bool violated = false;
    for (int k = 1; k <= n; ++k) {
      for (int c = 0; c < kStateDim; ++c) {
        if (x[k][c] > config.state_upper[c] + kBoundTol) {
          add_penalty(mu, config.state_upper[c], w_stage[k - 1][c],
                      t_stage[k - 1][c]);
          violated = true;
        } else if (x[k][c] < config.state_lower[c] - kBoundTol) {
          add_penalty(mu, config.state_lower[c], w_stage[k - 1][c],
                      t_stage[k - 1][c]);
          violated = true;
        }
      }
    }
    if (!violated) break;
  }
  return build_solution(model, x0, u);
}

const Vec6& reference_derivative(const MpcSolution& solution, int k) {
  if (k < 0 || k >= static_cast<int>(solution.predicted_state_derivatives.size())) {
    throw std::out_of_range("reference derivative index outside horizon");
  }
  return solution.predicted_state_derivatives[k];
}

MpcController::MpcController(const PlatformParams& params,
                             const MpcConfig& config, const MpcWeights& weights)
    : params_(params), config_(config), weights_(weights) {
  validate_problem(config_, weights_);
  // The attitude enters only through the rotation in B. When omega weighs x/y
  // and vx/vy isotropically, rotating state and target into the body-aligned
  // frame recovers the zero-attitude problem with the same inputs, so the
  // zero-attitude model serves every solve.
  rotation_reducible_ = weights_.omega[0] == weights_.omega[1] &&
                        weights_.omega[2] == weights_.omega[3];
  PlatformState zero;
  dm0_ = discretize(linearize(zero, params_), config_.step);
  // A stabilization target (zero position and velocity) is invariant under
  // the frame rotation, so the unconstrained feedback gains can be reused
  // across attitudes.
  gains_cached_ =
      rotation_reducible_ && config_.target.head<4>().isZero(0.0);
  if (gains_cached_) {
    const int n = config_.steps();
    const std::vector<StageCost> cost =
        uniform_stage_costs(weights_.omega, config_.target, config_.step, n);
    AffinePolicy policy =
        backward_sweep(dm0_.ad, dm0_.bd, cost, config_.step * weights_.rho,
                       nullptr, config_.input_lower, config_.input_upper);
    gain_ = std::move(policy.gain);
    offset_ = std::move(policy.offset);
  }
}

MpcSolution MpcController::solve_condensed(const PlatformState& current) const {
  return solve(discretize(linearize(current, params_), config_.step),
               current.vec(), config_, weights_);
}

MpcSolution MpcController::control(const PlatformState& current) const {
  const int n = config_.steps();
  const double dt = config_.step;
  const Eigen::Vector3d rho_dt = dt * weights_.rho;

  // Frame map x = T z: identity in the general case, block rotation in the
  // reducible case (z is then the body-aligned state).
  const bool rotated = rotation_reducible_;
  Eigen::Matrix2d c = Eigen::Matrix2d::Identity();
  if (rotated) c = rotation_matrix(current.theta);
  const auto to_frame = [&](const Vec6& v) {
    if (!rotated) return v;
    Vec6 z;
    z.segment<2>(0) = c.transpose() * v.segment<2>(0);
    z.segment<2>(2) = c.transpose() * v.segment<2>(2);
    z.segment<2>(4) = v.segment<2>(4);
    return z;
  };
  const auto from_frame = [&](const Vec6& z) {
    if (!rotated) return z;
    Vec6 x;
    x.segment<2>(0) = c * z.segment<2>(0);
    x.segment<2>(2) = c * z.segment<2>(2);
    x.segment<2>(4) = z.segment<2>(4);
    return x;
  };
  // Row c of T as a column vector: the world-frame channel seen from z.
  const auto frame_row = [&](int comp) {
    Vec6 a = Vec6::Unit(comp);
    if (rotated && comp < 4) {
      const int block = comp < 2 ? 0 : 2;
      a.segment<2>(block) = c.transpose() * Vec6::Unit(comp).segment<2>(block);
    }
    return a;
  };

  const DiscreteModel dm =
      rotated ? dm0_ : discretize(linearize(current, params_), dt);
  const Vec6 z0 = to_frame(current.vec());
  const Vec6 target_z = to_frame(config_.target);

  std::vector<StageCost> cost =
      uniform_stage_costs(weights_.omega, target_z, dt, n);
  SweepSolution sol;
  for (int iter = 0;; ++iter) {
    bool solved = false;
    if (iter == 0 && gains_cached_) {
      sol = forward_pass(dm.ad, dm.bd, z0, gain_, offset_);
      solved = true;
      for (int j = 0; j < sol.u.size() && solved; ++j) {
        const int i = j % 3;
        if (sol.u[j] > config_.input_upper[i] + kBoundTol ||
            sol.u[j] < config_.input_lower[i] - kBoundTol) {
          solved = false;
        }
      }
    }
    if (!solved) {
      sol = solve_box_sweep(dm.ad, dm.bd, z0, cost, rho_dt,
                            config_.input_lower, config_.input_upper);
    }

    if (iter >= kMaxPenaltyIters) break;
    const double mu = 1e4 * std::pow(10.0, iter);
    bool violated = false;
    for (int k = 1; k <= n; ++k) {
      const Vec6 x = from_frame(sol.states[k]);
      for (int comp = 0; comp < kStateDim; ++comp) {
        double bound = 0.0;
        if (x[comp] > config_.state_upper[comp] + kBoundTol) {
          bound = config_.state_upper[comp];
        } else if (x[comp] < config_.state_lower[comp] - kBoundTol) {
          bound = config_.state_lower[comp];
        } else {
          continue;
        }
        const Vec6 a = frame_row(comp);
        cost[k - 1].p += (dt * mu) * (a * a.transpose());
        cost[k - 1].r += (dt * mu * bound) * a;
        violated = true;
      }
    }
    if (!violated) break;
  }

  const LinearModel lm = linearize(current, params_);
  MpcSolution out;
  out.inputs.resize(n);
  out.predicted_states.resize(n + 1);
  out.predicted_state_derivatives.resize(n);
  for (int k = 0; k <= n; ++k) {
    out.predicted_states[k] = from_frame(sol.states[k]);
  }
  for (int k = 0; k < n; ++k) {
    out.inputs[k] = sol.u.segment<3>(3 * k);
    out.predicted_state_derivatives[k] =
        lm.a_hat * out.predicted_states[k] + lm.b_hat * out.inputs[k];
  }
  return out;
}

}  // namespace floatrl
