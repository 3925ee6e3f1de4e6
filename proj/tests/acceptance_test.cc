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
//
// One line per acceptance criterion: "ACCEPTANCE <n> PASS|FAIL <detail>".
// Criteria 10 and 11 need six trained runs (three seeds, both reward modes);
// those are cached under --cache and reused when complete and config-matched.
// --prepare-only builds the cache and exits.

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "verify/criteria.hpp"

int main(int argc, char** argv) {
  std::string cache_dir = "acceptance_cache";
  bool prepare_only = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--cache") == 0 && i + 1 < argc) {
      cache_dir = argv[++i];
    } else if (std::strcmp(argv[i], "--prepare-only") == 0) {
      prepare_only = true;
    } else {
      std::fprintf(stderr,
                   "usage: %s [--cache <dir>] [--prepare-only]\n", argv[0]);
      return 2;
    }
  }

  using namespace floatrl::verify;

  if (prepare_only) {
    ensure_paired_runs(acceptance_config(), acceptance_seeds(), cache_dir,
                       /*progress_every=*/5);
    std::printf("cache ready in %s\n", cache_dir.c_str());
    return 0;
  }

  struct Entry {
    int index;
    CheckResult (*check)();
  };
  const std::vector<Entry> standalone = {
      {1, dynamics_conservation}, {2, rotation_properties},
      {3, mpc_equivalence},       {4, gradient_checks},
      {5, clip_semantics},        {6, reward_values},
      {7, success_predicate},     {8, pwpf_behavior},
      {9, kl_adaptation},
  };

  int passed = 0;
  int total = 0;
  auto report = [&](int index, const CheckResult& result) {
    ++total;
    if (result.pass) ++passed;
    std::printf("ACCEPTANCE %d %s %s\n", index,
                result.pass ? "PASS" : "FAIL", result.detail.c_str());
    std::fflush(stdout);
  };

  for (const Entry& entry : standalone) report(entry.index, entry.check());

  const auto runs = ensure_paired_runs(acceptance_config(),
                                       acceptance_seeds(), cache_dir,
                                       /*progress_every=*/5);
  report(10, training_comparison(runs));
  report(11, disturbance_recovery(runs, acceptance_config()));
  report(12, determinism_persistence());

  std::printf("ACCEPTANCE SUMMARY %d/%d PASS\n", passed, total);
  return passed == total ? 0 : 1;
}
