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

#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "floatrl/checkpoint.hpp"
#include "floatrl/config.hpp"
#include "floatrl/csv.hpp"
#include "floatrl/env.hpp"
#include "floatrl/evaluate.hpp"
#include "floatrl/mpc.hpp"
#include "floatrl/pwpf.hpp"
#include "floatrl/train.hpp"
#include "verify/criteria.hpp"
#include "verify/oracles.hpp"

namespace {

namespace fs = std::filesystem;
using namespace floatrl;

int run_train(const std::string& config_path, const std::string& mode,
              std::uint64_t seed, const std::string& out_dir,
              int progress_every) {
  RunConfig cfg = config_path.empty() ? default_config()
                                      : load_config(config_path);
  cfg.env.reward.mode =
      mode == "mpc" ? RewardMode::kMpcGuided : RewardMode::kPpoOnly;
  TrainOptions opts;
  opts.seed = seed;
  opts.out_dir = out_dir;
  opts.progress_every = progress_every;
  const TrainResult result = train(cfg, opts);
  const UpdateRecord& last = result.history.back();
  std::printf(
      "trained %s seed %llu: %d updates, %llu episodes, final normalized "
      "reward %.4f, success rate %.2f, outputs in %s\n",
      reward_mode_name(cfg.env.reward.mode),
      static_cast<unsigned long long>(seed), last.update,
      static_cast<unsigned long long>(last.episodes),
      result.final_normalized_reward, last.success_rate, out_dir.c_str());
  return 0;
}

int run_eval(const std::string& checkpoint_path,
             const std::string& schedule_path, const std::string& config_path,
             const std::string& out_dir) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  RunConfig cfg = config_path.empty() ? default_config()
                                      : load_config(config_path);
  cfg.env.reward.mode = ckpt.mode;
  if (config_hash(cfg) != ckpt.config_hash) {
    std::fprintf(stderr,
                 "warning: configuration hash %016llx differs from the "
                 "checkpoint's %016llx; evaluating under the given config\n",
                 static_cast<unsigned long long>(config_hash(cfg)),
                 static_cast<unsigned long long>(ckpt.config_hash));
  }
  const DisturbanceSchedule schedule =
      schedule_path.empty() ? DisturbanceSchedule::default_schedule()
                            : load_schedule(schedule_path);
  Environment env(cfg.env);
  const EvaluationResult result =
      evaluate(env, ckpt.policy, ckpt.normalizer, schedule);
  fs::create_directories(out_dir);
  write_step_csv(out_dir + "/trajectory.csv", result.episode,
                 cfg.env.episode);
  write_metrics_csv(out_dir + "/disturbance_metrics.csv", result.metrics);
  for (const DisturbanceMetrics& m : result.metrics) {
    std::printf(
        "event t=%.1f s: peak position %.3f m, peak angle %.3f rad, %s "
        "(%.1f s), steady state %.4f m / %.4f rad\n",
        m.t_event, m.peak_position_error, m.peak_angle_error,
        m.recovered ? "recovered" : "NOT recovered", m.time_to_recover,
        m.steady_state_position, m.steady_state_angle);
  }
  std::printf("%s; outputs in %s\n",
              result.all_recovered ? "all events recovered"
                                   : "some events not recovered",
              out_dir.c_str());
  return result.all_recovered ? 0 : 1;
}

void dump_mpc_trajectory(const std::string& path) {
  const PlatformParams params;
  const MpcConfig config;
  const MpcWeights weights;
  MpcController controller(params, config, weights);
  PlatformState s;
  s.x = 1.0;
  s.y = -0.6;
  s.theta = 1.2;
  const MpcSolution sol = controller.control(s);
  CsvWriter csv(path, {"t", "x", "y", "vx", "vy", "theta", "omega", "fx", "fy",
                       "torque", "dvx", "dvy", "domega"});
  for (std::size_t k = 0; k < sol.inputs.size(); ++k) {
    const Vec6& x = sol.predicted_states[k];
    const Eigen::Vector3d& u = sol.inputs[k];
    const Vec6& d = sol.predicted_state_derivatives[k];
    csv.row({static_cast<double>(k) * config.step, x[0], x[1], x[2], x[3],
             x[4], x[5], u[0], u[1], u[2], d[2], d[3], d[5]});
  }
}

void dump_pwpf_sweep(const std::string& path) {
  const PwpfParams params;
  const double dt = 0.1;
  CsvWriter csv(path, {"command", "duty", "duty_fine_step"});
  for (int i = 1; i <= 20; ++i) {
    const double command = 0.05 * i;
    PwpfState state;
    double total = 0.0;
    const int periods = 2000;
    for (int k = 0; k < periods; ++k)
      total += pwpf_period(state, command, dt, params);
    csv.row({command, total / periods,
             verify::pwpf_duty_euler(params, command, dt / 100.0, 200.0)});
  }
}

int run_verify(const std::string& group, const std::string& out_dir) {
  struct Entry {
    const char* name;
    std::function<verify::CheckResult()> check;
  };
  std::vector<Entry> checks;
  const bool all = group == "all";
  if (all || group == "dynamics") {
    checks.push_back({"dynamics_conservation", verify::dynamics_conservation});
    checks.push_back({"rotation_properties", verify::rotation_properties});
  }
  if (all || group == "mpc") {
    checks.push_back({"mpc_equivalence", verify::mpc_equivalence});
  }
  if (all || group == "pwpf") {
    checks.push_back({"pwpf_behavior", verify::pwpf_behavior});
  }
  if (all || group == "ppo") {
    checks.push_back({"gradient_checks", verify::gradient_checks});
    checks.push_back({"clip_semantics", verify::clip_semantics});
    checks.push_back({"kl_adaptation", verify::kl_adaptation});
  }
  if (all || group == "reward") {
    checks.push_back({"reward_values", verify::reward_values});
  }
  if (all || group == "harness") {
    checks.push_back({"success_predicate", verify::success_predicate});
    checks.push_back(
        {"determinism_persistence", verify::determinism_persistence});
  }
  if (checks.empty()) {
    std::fprintf(stderr, "unknown verify group: %s\n", group.c_str());
    return 2;
  }

  fs::create_directories(out_dir);
  if (all || group == "mpc")
    dump_mpc_trajectory(out_dir + "/mpc_trajectory.csv");
  if (all || group == "pwpf") dump_pwpf_sweep(out_dir + "/pwpf_sweep.csv");

  bool pass = true;
  for (const Entry& entry : checks) {
    const verify::CheckResult result = entry.check();
    pass = pass && result.pass;
    std::printf("VERIFY %-24s %s  %s\n", entry.name,
                result.pass ? "PASS" : "FAIL", result.detail.c_str());
    std::fflush(stdout);
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Pulsed-thruster platform stabilization: model-predictive guidance "
      "for proximal policy optimization"};
  app.require_subcommand(1);

  auto* train_cmd =
      app.add_subcommand("train", "Train a policy and write logs/checkpoint");
  std::string train_config;
  std::string mode = "mpc";
  std::uint64_t seed = 0;
  std::string train_out = "run";
  int progress_every = 10;
  train_cmd->add_option("--config", train_config,
                        "JSON run configuration (defaults apply if omitted)");
  train_cmd->add_option("--mode", mode, "Reward mode")
      ->check(CLI::IsMember({"mpc", "ppo-only"}));
  train_cmd->add_option("--seed", seed, "Run seed");
  train_cmd->add_option("--out", train_out, "Output directory");
  train_cmd->add_option("--progress-every", progress_every,
                        "Progress line to stderr every n updates (0 = quiet)");

  auto* eval_cmd = app.add_subcommand(
      "eval", "Run a trained policy against an impulse schedule");
  std::string checkpoint_path;
  std::string schedule_path;
  std::string eval_config;
  std::string eval_out = "eval";
  eval_cmd->add_option("--checkpoint", checkpoint_path, "Trained checkpoint")
      ->required();
  eval_cmd->add_option("--schedule", schedule_path,
                       "JSON impulse schedule (built-in default if omitted)");
  eval_cmd->add_option("--config", eval_config,
                       "JSON run configuration (defaults apply if omitted)");
  eval_cmd->add_option("--out", eval_out, "Output directory");

  auto* verify_cmd =
      app.add_subcommand("verify", "Run the property suites (exit 0 on pass)");
  std::string group = "all";
  std::string verify_out = ".";
  verify_cmd->add_option(
      "group", group,
      "dynamics | mpc | pwpf | ppo | reward | harness | all");
  verify_cmd->add_option("--out", verify_out, "Directory for CSV dumps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd)
      return run_train(train_config, mode, seed, train_out, progress_every);
    if (*eval_cmd)
      return run_eval(checkpoint_path, schedule_path, eval_config, eval_out);
    return run_verify(group, verify_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
