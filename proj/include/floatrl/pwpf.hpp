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

#ifndef FLOATRL_PWPF_HPP_
#define FLOATRL_PWPF_HPP_

#include <vector>

namespace floatrl {

// Pulse-width pulse-frequency modulator: a first-order lag on the command
// error feeding a Schmitt trigger. Commands below off_threshold/gain can
// never fire; the dead band ends at on_threshold/gain.
struct PwpfParams {
  double gain = 4.5;
  double time_constant = 0.15;  // [s]
  double on_threshold = 0.45;
  double off_threshold = 0.15;
  int substeps = 10;  // pulse quantization slots per control period
};

struct PwpfState {
  double filter = 0.0;
  bool on = false;
};

// Advances the filter df/dt = (gain*(command - out) - f)/time_constant over
// one slot of length h, with out the trigger output. Threshold crossings are
// located in closed form and the trigger toggles at the exact crossing, so
// the continuous-time trajectory is reproduced; only the returned pulse is
// quantized, to the trigger state at the end of the slot.
bool pwpf_substep(PwpfState& s, double command, double h, const PwpfParams& p);

// One control period of length dt, split into p.substeps slots. Returns the
// fraction of slots whose pulse is on; if pulses is non-null it receives the
// per-slot pulse train.
double pwpf_period(PwpfState& s, double command, double dt,
                   const PwpfParams& p, std::vector<bool>* pulses = nullptr);

}  // namespace floatrl

#endif  // FLOATRL_PWPF_HPP_
