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

#include "floatrl/pwpf.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "verify/oracles.hpp"

namespace floatrl {
namespace {

double long_run_duty(const PwpfParams& params, double command,
                     double seconds, double dt = 0.1) {
  PwpfState state;
  const int periods = static_cast<int>(seconds / dt);
  double total = 0.0;
  for (int k = 0; k < periods; ++k)
    total += pwpf_period(state, command, dt, params);
  return total / periods;
}

TEST(Pwpf, ZeroCommandNeverFires) {
  const PwpfParams params;
  PwpfState state;
  for (int k = 0; k < 500; ++k) {
    EXPECT_EQ(pwpf_period(state, 0.0, 0.1, params), 0.0);
    EXPECT_FALSE(state.on);
  }
  EXPECT_EQ(state.filter, 0.0);
}

TEST(Pwpf, DeadZoneEdge) {
  const PwpfParams params;
  // Below gain*command = on_threshold the filter can never reach the trigger.
  const double edge = params.on_threshold / params.gain;
  EXPECT_EQ(long_run_duty(params, edge - 0.005, 100.0), 0.0);
  EXPECT_GT(long_run_duty(params, edge + 0.005, 100.0), 0.0);
}

TEST(Pwpf, DutyMonotoneInCommand) {
  const PwpfParams params;
  double previous = -1.0;
  for (int i = 1; i <= 20; ++i) {
    const double duty = long_run_duty(params, 0.05 * i, 100.0);
    EXPECT_GE(duty, previous - 1e-12);
    previous = duty;
  }
  EXPECT_GT(previous, 0.9);
}

TEST(Pwpf, FullCommandDutyMatchesFilterAnalysis) {
  const PwpfParams params;
  // At command 1 the on phase decays from the upper to the lower threshold
  // with zero filter input, the off phase rises back driven by the full
  // error; both durations follow from the first-order filter.
  const double t_on = params.time_constant *
                      std::log(params.on_threshold / params.off_threshold);
  const double u_off = params.gain * 1.0;
  const double t_off = params.time_constant *
                       std::log((u_off - params.off_threshold) /
                                (u_off - params.on_threshold));
  const double expected = t_on / (t_on + t_off);
  EXPECT_NEAR(long_run_duty(params, 1.0, 200.0), expected, 0.01);
}

TEST(Pwpf, DutyMatchesFineStepOracle) {
  const PwpfParams params;
  for (double command : {0.15, 0.3, 0.5, 0.75, 1.0}) {
    const double duty = long_run_duty(params, command, 200.0);
    const double oracle =
        verify::pwpf_duty_euler(params, command, 1e-3, 200.0);
    EXPECT_NEAR(duty, oracle, 0.02) << "command " << command;
  }
}

TEST(Pwpf, HysteresisHoldsStateBetweenThresholds) {
  const PwpfParams params;
  // Same filter value, between thresholds: output keeps its history.
  PwpfState off_state{0.3, false};
  const double hold_cmd = 0.3 / params.gain;  // filter equilibrium at 0.3
  for (int k = 0; k < 200; ++k) {
    pwpf_period(off_state, hold_cmd, 0.1, params);
    ASSERT_FALSE(off_state.on);
  }
  PwpfState on_state{0.3, true};
  const double h = 0.1 / params.substeps;
  for (int k = 0; k < 5; ++k) {
    pwpf_substep(on_state, 1.0, h, params);
    ASSERT_TRUE(on_state.on);
  }
}

TEST(Pwpf, SubstepAggregation) {
  const PwpfParams params;
  // One period equals substeps sequential substeps in filter state.
  PwpfState a;
  PwpfState b;
  const double command = 0.6;
  pwpf_period(a, command, 0.1, params);
  const double h = 0.1 / params.substeps;
  for (int i = 0; i < params.substeps; ++i) pwpf_substep(b, command, h, params);
  EXPECT_NEAR(a.filter, b.filter, 1e-12);
  EXPECT_EQ(a.on, b.on);
}

TEST(Pwpf, PulseTrainCyclesAndMatchesDuty) {
  const PwpfParams params;
  PwpfState state;
  int rising_edges = 0;
  int on_slots = 0;
  int total_slots = 0;
  double duty_sum = 0.0;
  bool previous = false;
  for (int k = 0; k < 1000; ++k) {
    std::vector<bool> train;
    duty_sum += pwpf_period(state, 0.5, 0.1, params, &train);
    ASSERT_EQ(train.size(), static_cast<std::size_t>(params.substeps));
    for (const bool slot : train) {
      rising_edges += slot && !previous;
      on_slots += slot;
      ++total_slots;
      previous = slot;
    }
  }
  // The modulator cycles rather than latching, and the returned duty is the
  // on-slot fraction.
  EXPECT_GT(rising_edges, 10);
  EXPECT_NEAR(duty_sum / 1000.0,
              static_cast<double>(on_slots) / total_slots, 1e-12);
}

TEST(Pwpf, DutyWithinUnitInterval) {
  const PwpfParams params;
  PwpfState state;
  for (int k = 0; k < 2000; ++k) {
    const double duty = pwpf_period(state, 0.9, 0.1, params);
    ASSERT_GE(duty, 0.0);
    ASSERT_LE(duty, 1.0);
  }
}

}  // namespace
}  // namespace floatrl
