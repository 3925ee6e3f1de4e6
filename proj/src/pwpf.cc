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

namespace floatrl {
namespace {

// Time until the filter, relaxing from f0 toward target, reaches the trigger
// threshold for the current mode. Negative when no crossing lies ahead.
double crossing_time(double f0, double target, double threshold, double tau) {
  const double a = f0 - target;
  const double b = threshold - target;
  // The filter moves monotonically from f0 toward target; it meets the
  // threshold only if the threshold sits between them.
  if (a == b) return 0.0;
  if ((a > 0.0) != (b > 0.0) || std::abs(b) >= std::abs(a) || b == 0.0) {
    return -1.0;
  }
  return tau * std::log(a / b);
}

}  // namespace

bool pwpf_substep(PwpfState& s, double command, double h,
                  const PwpfParams& p) {
  const double tau = p.time_constant;
  double remaining = h;
  // Threshold chatter is bounded (the hysteresis band takes finite time to
  // recross) but guard against degenerate parameter sets.
  for (int toggles = 0; toggles < 64; ++toggles) {
    // An already-violated threshold switches immediately.
    if (!s.on && s.filter >= p.on_threshold) {
      s.on = true;
      continue;
    }
    if (s.on && s.filter <= p.off_threshold) {
      s.on = false;
      continue;
    }
    const double target = p.gain * (command - (s.on ? 1.0 : 0.0));
    const double threshold = s.on ? p.off_threshold : p.on_threshold;
    const double tc = crossing_time(s.filter, target, threshold, tau);
    if (tc < 0.0 || tc > remaining) {
      s.filter = target + (s.filter - target) * std::exp(-remaining / tau);
      return s.on;
    }
    remaining -= tc;
    s.filter = threshold;
    s.on = !s.on;
  }
  return s.on;
}

double pwpf_period(PwpfState& s, double command, double dt,
                   const PwpfParams& p, std::vector<bool>* pulses) {
  if (pulses) pulses->clear();
  const double h = dt / p.substeps;
  int on_count = 0;
  for (int k = 0; k < p.substeps; ++k) {
    const bool pulse = pwpf_substep(s, command, h, p);
    on_count += pulse ? 1 : 0;
    if (pulses) pulses->push_back(pulse);
  }
  return static_cast<double>(on_count) / p.substeps;
}

}  // namespace floatrl
