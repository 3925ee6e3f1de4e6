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

#include "floatrl/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace floatrl {
namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  if (!j.is_object()) {
    throw std::invalid_argument("config section is not an object: " + where);
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument("unknown config key: " + where + "." +
                                  item.key());
    }
  }
}

void read(const json& j, const char* key, double* out) {
  if (j.contains(key)) *out = j.at(key).get<double>();
}

void read(const json& j, const char* key, int* out) {
  if (j.contains(key)) *out = j.at(key).get<int>();
}

void read(const json& j, const char* key, std::vector<int>* out) {
  if (j.contains(key)) *out = j.at(key).get<std::vector<int>>();
}

template <typename Vec>
void read_fixed(const json& j, const char* key, const std::string& where,
                Vec* out) {
  if (!j.contains(key)) return;
  const auto values = j.at(key).get<std::vector<double>>();
  if (static_cast<int>(values.size()) != out->size()) {
    std::ostringstream msg;
    msg << where << "." << key << " needs " << out->size() << " entries, got "
        << values.size();
    throw std::invalid_argument(msg.str());
  }
  for (int i = 0; i < out->size(); ++i) (*out)[i] = values[i];
}

template <typename Vec>
json fixed_to_json(const Vec& v) {
  std::vector<double> values(v.data(), v.data() + v.size());
  return json(values);
}

void parse_platform(const json& j, PlatformParams* p) {
  require_keys(j, "platform", {"mass", "inertia", "dt"});
  read(j, "mass", &p->mass);
  read(j, "inertia", &p->inertia);
  read(j, "dt", &p->dt);
}

void parse_thrusters(const json& j, ThrusterLayout* t) {
  require_keys(j, "thrusters", {"arm", "max_force"});
  double arm = std::abs(t->position(0, 0));
  double max_force = t->max_force[0];
  read(j, "arm", &arm);
  read(j, "max_force", &max_force);
  if (arm <= 0.0 || max_force <= 0.0) {
    throw std::invalid_argument("thrusters.arm and .max_force must be > 0");
  }
  *t = ThrusterLayout::box_default(arm, max_force);
}

void parse_pwpf(const json& j, PwpfParams* p) {
  require_keys(j, "pwpf",
               {"gain", "time_constant", "on_threshold", "off_threshold",
                "substeps"});
  read(j, "gain", &p->gain);
  read(j, "time_constant", &p->time_constant);
  read(j, "on_threshold", &p->on_threshold);
  read(j, "off_threshold", &p->off_threshold);
  read(j, "substeps", &p->substeps);
}

void parse_mpc(const json& j, MpcConfig* c, MpcWeights* w) {
  require_keys(j, "mpc",
               {"horizon", "step", "state_weight", "input_weight",
                "position_bound", "input_bound"});
  read(j, "horizon", &c->horizon);
  read(j, "step", &c->step);
  read_fixed(j, "state_weight", "mpc", &w->omega);
  read_fixed(j, "input_weight", "mpc", &w->rho);
  Eigen::Vector2d pos_bound{c->state_upper[0], c->state_upper[1]};
  read_fixed(j, "position_bound", "mpc", &pos_bound);
  c->state_upper[0] = pos_bound[0];
  c->state_upper[1] = pos_bound[1];
  c->state_lower[0] = -pos_bound[0];
  c->state_lower[1] = -pos_bound[1];
  Eigen::Vector3d input_bound = c->input_upper;
  read_fixed(j, "input_bound", "mpc", &input_bound);
  c->input_upper = input_bound;
  c->input_lower = -input_bound;
}

void parse_reward(const json& j, RewardConfig* r) {
  require_keys(j, "reward",
               {"mode", "deriv_weight", "effort_weight", "psi1", "psi2", "k0",
                "k_rate"});
  if (j.contains("mode")) {
    r->mode = reward_mode_from_name(j.at("mode").get<std::string>());
  }
  read_fixed(j, "deriv_weight", "reward", &r->deriv_weight);
  read_fixed(j, "effort_weight", "reward", &r->effort_weight);
  read(j, "psi1", &r->psi1);
  read(j, "psi2", &r->psi2);
  read(j, "k0", &r->k0);
  read(j, "k_rate", &r->k_rate);
}

void parse_episode(const json& j, EpisodeConfig* e) {
  require_keys(j, "episode",
               {"control_dt", "train_time_limit", "test_time_limit",
                "success_position", "success_speed", "success_angle",
                "success_rate", "init_pos_x", "init_pos_y", "init_speed",
                "init_rate", "room_half_x", "room_half_y", "bound_penalty"});
  read(j, "control_dt", &e->control_dt);
  read(j, "train_time_limit", &e->train_time_limit);
  read(j, "test_time_limit", &e->test_time_limit);
  read(j, "success_position", &e->success_position);
  read(j, "success_speed", &e->success_speed);
  read(j, "success_angle", &e->success_angle);
  read(j, "success_rate", &e->success_rate);
  read(j, "init_pos_x", &e->init_pos_x);
  read(j, "init_pos_y", &e->init_pos_y);
  read(j, "init_speed", &e->init_speed);
  read(j, "init_rate", &e->init_rate);
  read(j, "room_half_x", &e->room_half_x);
  read(j, "room_half_y", &e->room_half_y);
  read(j, "bound_penalty", &e->bound_penalty);
}

void parse_ppo(const json& j, PpoConfig* p) {
  require_keys(j, "ppo",
               {"gamma", "clip_epsilon", "target_kl", "actor_lr", "critic_lr",
                "epochs", "minibatch_size", "batch_episodes", "max_episodes",
                "max_updates", "lr_factor", "eps_factor", "eps_min", "eps_max",
                "lr_min", "lr_max"});
  read(j, "gamma", &p->gamma);
  read(j, "clip_epsilon", &p->clip_epsilon);
  read(j, "target_kl", &p->target_kl);
  read(j, "actor_lr", &p->actor_lr);
  read(j, "critic_lr", &p->critic_lr);
  read(j, "epochs", &p->epochs);
  read(j, "minibatch_size", &p->minibatch_size);
  read(j, "batch_episodes", &p->batch_episodes);
  read(j, "max_episodes", &p->max_episodes);
  read(j, "max_updates", &p->max_updates);
  read(j, "lr_factor", &p->lr_factor);
  read(j, "eps_factor", &p->eps_factor);
  read(j, "eps_min", &p->eps_min);
  read(j, "eps_max", &p->eps_max);
  read(j, "lr_min", &p->lr_min);
  read(j, "lr_max", &p->lr_max);
}

void parse_network(const json& j, NetworkConfig* n) {
  require_keys(j, "network", {"actor_hidden", "critic_hidden", "log_std_init"});
  read(j, "actor_hidden", &n->actor_hidden);
  read(j, "critic_hidden", &n->critic_hidden);
  read(j, "log_std_init", &n->log_std_init);
  for (int width : n->actor_hidden) {
    if (width <= 0) throw std::invalid_argument("network.actor_hidden <= 0");
  }
  for (int width : n->critic_hidden) {
    if (width <= 0) throw std::invalid_argument("network.critic_hidden <= 0");
  }
}

}  // namespace

const char* reward_mode_name(RewardMode mode) {
  return mode == RewardMode::kMpcGuided ? "mpc_guided" : "ppo_only";
}

RewardMode reward_mode_from_name(const std::string& name) {
  if (name == "mpc_guided") return RewardMode::kMpcGuided;
  if (name == "ppo_only") return RewardMode::kPpoOnly;
  throw std::invalid_argument("unknown reward mode: " + name +
                              " (expected mpc_guided or ppo_only)");
}

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config parse: ") + e.what());
  }
  require_keys(j, "config",
               {"platform", "thrusters", "pwpf", "mpc", "reward", "episode",
                "ppo", "network"});
  RunConfig cfg;
  try {
    if (j.contains("platform")) parse_platform(j["platform"], &cfg.env.platform);
    if (j.contains("thrusters")) parse_thrusters(j["thrusters"], &cfg.env.thrusters);
    if (j.contains("pwpf")) parse_pwpf(j["pwpf"], &cfg.env.pwpf);
    if (j.contains("mpc")) parse_mpc(j["mpc"], &cfg.env.mpc, &cfg.env.mpc_weights);
    if (j.contains("reward")) parse_reward(j["reward"], &cfg.env.reward);
    if (j.contains("episode")) parse_episode(j["episode"], &cfg.env.episode);
    if (j.contains("ppo")) parse_ppo(j["ppo"], &cfg.ppo);
    if (j.contains("network")) parse_network(j["network"], &cfg.network);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config value: ") + e.what());
  }
  validate(cfg.ppo);
  cfg.env.mpc.steps();
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  json j;
  j["platform"] = {{"mass", cfg.env.platform.mass},
                   {"inertia", cfg.env.platform.inertia},
                   {"dt", cfg.env.platform.dt}};
  j["thrusters"] = {{"arm", std::abs(cfg.env.thrusters.position(0, 0))},
                    {"max_force", cfg.env.thrusters.max_force[0]}};
  j["pwpf"] = {{"gain", cfg.env.pwpf.gain},
               {"time_constant", cfg.env.pwpf.time_constant},
               {"on_threshold", cfg.env.pwpf.on_threshold},
               {"off_threshold", cfg.env.pwpf.off_threshold},
               {"substeps", cfg.env.pwpf.substeps}};
  j["mpc"] = {{"horizon", cfg.env.mpc.horizon},
              {"step", cfg.env.mpc.step},
              {"state_weight", fixed_to_json(cfg.env.mpc_weights.omega)},
              {"input_weight", fixed_to_json(cfg.env.mpc_weights.rho)},
              {"position_bound",
               fixed_to_json(Eigen::Vector2d{cfg.env.mpc.state_upper[0],
                                             cfg.env.mpc.state_upper[1]})},
              {"input_bound", fixed_to_json(cfg.env.mpc.input_upper)}};
  j["reward"] = {{"mode", reward_mode_name(cfg.env.reward.mode)},
                 {"deriv_weight", fixed_to_json(cfg.env.reward.deriv_weight)},
                 {"effort_weight", fixed_to_json(cfg.env.reward.effort_weight)},
                 {"psi1", cfg.env.reward.psi1},
                 {"psi2", cfg.env.reward.psi2},
                 {"k0", cfg.env.reward.k0},
                 {"k_rate", cfg.env.reward.k_rate}};
  const EpisodeConfig& e = cfg.env.episode;
  j["episode"] = {{"control_dt", e.control_dt},
                  {"train_time_limit", e.train_time_limit},
                  {"test_time_limit", e.test_time_limit},
                  {"success_position", e.success_position},
                  {"success_speed", e.success_speed},
                  {"success_angle", e.success_angle},
                  {"success_rate", e.success_rate},
                  {"init_pos_x", e.init_pos_x},
                  {"init_pos_y", e.init_pos_y},
                  {"init_speed", e.init_speed},
                  {"init_rate", e.init_rate},
                  {"room_half_x", e.room_half_x},
                  {"room_half_y", e.room_half_y},
                  {"bound_penalty", e.bound_penalty}};
  const PpoConfig& p = cfg.ppo;
  j["ppo"] = {{"gamma", p.gamma},
              {"clip_epsilon", p.clip_epsilon},
              {"target_kl", p.target_kl},
              {"actor_lr", p.actor_lr},
              {"critic_lr", p.critic_lr},
              {"epochs", p.epochs},
              {"minibatch_size", p.minibatch_size},
              {"batch_episodes", p.batch_episodes},
              {"max_episodes", p.max_episodes},
              {"max_updates", p.max_updates},
              {"lr_factor", p.lr_factor},
              {"eps_factor", p.eps_factor},
              {"eps_min", p.eps_min},
              {"eps_max", p.eps_max},
              {"lr_min", p.lr_min},
              {"lr_max", p.lr_max}};
  j["network"] = {{"actor_hidden", cfg.network.actor_hidden},
                  {"critic_hidden", cfg.network.critic_hidden},
                  {"log_std_init", cfg.network.log_std_init}};
  return j.dump(2) + "\n";
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void save_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << serialize_config(cfg);
  if (!out) throw std::runtime_error("short write on config file: " + path);
}

DisturbanceSchedule parse_schedule(const std::string& text) {
  const json j = json::parse(text);
  require_keys(j, "schedule", {"duration", "events"});
  DisturbanceSchedule schedule;
  schedule.events.clear();
  read(j, "duration", &schedule.duration);
  if (schedule.duration <= 0.0) {
    throw std::invalid_argument("schedule.duration must be positive");
  }
  if (j.contains("events")) {
    if (!j.at("events").is_array()) {
      throw std::invalid_argument("schedule.events must be an array");
    }
    double previous = -1.0;
    for (const json& e : j.at("events")) {
      require_keys(e, "schedule.events", {"t", "dvx", "dvy", "domega"});
      DisturbanceEvent event;
      read(e, "t", &event.t);
      read(e, "dvx", &event.impulse.dvx);
      read(e, "dvy", &event.impulse.dvy);
      read(e, "domega", &event.impulse.domega);
      if (event.t <= previous) {
        throw std::invalid_argument(
            "schedule.events times must be strictly increasing");
      }
      if (event.t < 0.0 || event.t >= schedule.duration) {
        throw std::invalid_argument(
            "schedule event time outside [0, duration)");
      }
      previous = event.t;
      schedule.events.push_back(event);
    }
  }
  return schedule;
}

std::string serialize_schedule(const DisturbanceSchedule& schedule) {
  json j;
  j["duration"] = schedule.duration;
  j["events"] = json::array();
  for (const DisturbanceEvent& e : schedule.events) {
    j["events"].push_back({{"t", e.t},
                           {"dvx", e.impulse.dvx},
                           {"dvy", e.impulse.dvy},
                           {"domega", e.impulse.domega}});
  }
  return j.dump(2) + "\n";
}

DisturbanceSchedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schedule file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_schedule(buffer.str());
}

void save_schedule(const std::string& path,
                   const DisturbanceSchedule& schedule) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write schedule file: " + path);
  out << serialize_schedule(schedule);
  if (!out) throw std::runtime_error("short write on schedule file: " + path);
}

std::uint64_t config_hash(const RunConfig& cfg) {
  const std::string canonical = serialize_config(cfg);
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace floatrl
