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

#ifndef FLOATRL_VERIFY_CRITERIA_HPP_
#define FLOATRL_VERIFY_CRITERIA_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "floatrl/config.hpp"
#include "floatrl/train.hpp"

// Property suites behind the `verify` CLI and the acceptance runner. Each
// check is self-contained and returns a verdict plus the measured numbers it
// was judged on.
namespace floatrl::verify {

struct CheckResult {
  bool pass = false;
  std::string detail;
};

// Free drift conserves linear and angular momentum; constant-wrench
// trajectories match the closed-form kinematics.
CheckResult dynamics_conservation();

// Rotation matrices are orthonormal with unit determinant.
CheckResult rotation_properties();

// The horizon solver matches the stacked least-squares oracle when
// unconstrained, the single-stage closed form at horizon one, and returns
// zero inputs from the target.
CheckResult mpc_equivalence();

// Network backward, the clipped surrogate, and the value loss all match
// central finite differences.
CheckResult gradient_checks();

// Ratio clipping: pass-through inside the band, exact clamps outside and at
// the boundaries.
CheckResult clip_semantics();

// Reward arithmetic: the rest value, random substitution against an
// independent oracle, and the zero-reference mode equality.
CheckResult reward_values();

// Success predicate boundary behavior on all four thresholds.
CheckResult success_predicate();

// Modulator dead zone, hysteresis, duty accuracy against a fine-step
// simulation, and duty monotonicity.
CheckResult pwpf_behavior();

// Closed-form Gaussian KL against Monte Carlo, and the adaptation rule
// holding the per-update KL near its target on a synthetic quadratic-reward
// problem.
CheckResult kl_adaptation();

// Bit-identical reruns of a seeded training config and an exact checkpoint
// round trip on a probe observation set.
CheckResult determinism_persistence();

// One mpc-guided and one ppo-only run trained with the same seed and budget.
struct TrainedPair {
  std::uint64_t seed = 0;
  TrainResult mpc;
  TrainResult ppo;
};

// The desk-scale budget the training-dependent checks run at.
RunConfig acceptance_config();
const std::vector<std::uint64_t>& acceptance_seeds();

// Trains the paired runs, or reloads them from cache_dir when a completed
// run with the same mode, seed, and config hash is already there.
std::vector<TrainedPair> ensure_paired_runs(const RunConfig& base,
                                            const std::vector<std::uint64_t>& seeds,
                                            const std::string& cache_dir,
                                            int progress_every = 0);

// Guided training ends higher and reaches its own 90% level in fewer
// episodes than the unguided ablation, in every pair.
CheckResult training_comparison(const std::vector<TrainedPair>& runs);

// The trained guided agent re-stabilizes between scheduled impulses in most
// seeds, and the unguided agent holds a larger steady-state position error.
CheckResult disturbance_recovery(const std::vector<TrainedPair>& runs,
                                 const RunConfig& base);

}  // namespace floatrl::verify

#endif  // FLOATRL_VERIFY_CRITERIA_HPP_
