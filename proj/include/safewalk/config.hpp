// JSON configuration file. Every section and key is optional; missing values
// keep their defaults and unknown keys are rejected.
//
// {
//   "locomotion": { "v_t", "exit_margin", "enter_frames", "exit_dwell",
//                   "wip_gain", "wip_reference_height", "wip_max_speed" },
//   "zones":      { "danger_limit", "warning_limit", "prewarning_limit" },
//   "warning":    { "fov_half_angle", "gaze_half_angle" },        // radians
//   "tracking":   { "kalman_q", "kalman_r", "speed_window", "rise_threshold",
//                   "refractory", "pace_window", "activity_timeout",
//                   "baseline_window" },
//   "sim":        { "collision_radius", "tick" },
//   "service":    { "max_ground_speed", "max_march_rate", "max_turn_rate",
//                   "walk_step_rate", "walk_knee_lift", "march_knee_lift",
//                   "noise_sigma", "seed" }
// }

#pragma once

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "safewalk/session.hpp"

namespace safewalk {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

class SectionReader {
 public:
  SectionReader(const nlohmann::json& root, const std::string& name) : name_(name) {
    if (root.contains(name)) {
      section_ = root.at(name);
      if (!section_.is_object()) throw ConfigError("config section " + name + " must be an object");
    } else {
      section_ = nlohmann::json::object();
    }
  }

  template <typename T>
  SectionReader& read(const std::string& key, T& target) {
    seen_[key] = true;
    if (!section_.contains(key)) return *this;
    try {
      target = section_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config " + name_ + "." + key + " has the wrong type");
    }
    return *this;
  }

  void finish() const {
    for (const auto& [key, value] : section_.items()) {
      if (!seen_.contains(key)) throw ConfigError("unknown config key " + name_ + "." + key);
    }
  }

 private:
  std::string name_;
  nlohmann::json section_;
  std::map<std::string, bool> seen_;
};

}  // namespace detail

inline ServiceConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "locomotion" && key != "zones" && key != "warning" && key != "tracking" && key != "sim" &&
        key != "service") {
      throw ConfigError("unknown config section " + key);
    }
  }
  ServiceConfig cfg;
  auto& p = cfg.sim.pipeline;

  detail::SectionReader loco(j, "locomotion");
  loco.read("v_t", p.locomotion.v_t)
      .read("exit_margin", p.locomotion.exit_margin)
      .read("enter_frames", p.locomotion.enter_frames)
      .read("exit_dwell", p.locomotion.exit_dwell)
      .read("wip_gain", p.locomotion.wip_gain)
      .read("wip_reference_height", p.locomotion.wip_reference_height)
      .read("wip_max_speed", p.locomotion.wip_max_speed)
      .finish();

  detail::SectionReader zones(j, "zones");
  zones.read("danger_limit", p.warning.zones.danger_limit)
      .read("warning_limit", p.warning.zones.warning_limit)
      .read("prewarning_limit", p.warning.zones.prewarning_limit)
      .finish();

  detail::SectionReader warning(j, "warning");
  warning.read("fov_half_angle", p.warning.fov_half_angle)
      .read("gaze_half_angle", p.warning.gaze_half_angle)
      .finish();

  detail::SectionReader tracking(j, "tracking");
  tracking.read("kalman_q", p.kalman.q)
      .read("kalman_r", p.kalman.r)
      .read("speed_window", p.speed_window)
      .read("rise_threshold", p.steps.rise_threshold)
      .read("refractory", p.steps.refractory)
      .read("pace_window", p.steps.pace_window)
      .read("activity_timeout", p.steps.activity_timeout)
      .read("baseline_window", p.steps.baseline_window)
      .read("baseline_quantile", p.steps.baseline_quantile)
      .finish();

  detail::SectionReader sim(j, "sim");
  sim.read("collision_radius", cfg.sim.collision_radius).read("tick", cfg.sim.tick).finish();

  detail::SectionReader service(j, "service");
  service.read("max_ground_speed", cfg.max_ground_speed)
      .read("max_march_rate", cfg.max_march_rate)
      .read("max_turn_rate", cfg.max_turn_rate)
      .read("walk_step_rate", cfg.walk_step_rate)
      .read("walk_knee_lift", cfg.walk_knee_lift)
      .read("march_knee_lift", cfg.march_knee_lift)
      .read("noise_sigma", cfg.noise_sigma)
      .read("seed", cfg.seed)
      .finish();

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

inline nlohmann::json config_to_json(const ServiceConfig& cfg) {
  const auto& p = cfg.sim.pipeline;
  return {{"locomotion",
           {{"v_t", p.locomotion.v_t},
            {"exit_margin", p.locomotion.exit_margin},
            {"enter_frames", p.locomotion.enter_frames},
            {"exit_dwell", p.locomotion.exit_dwell},
            {"wip_gain", p.locomotion.wip_gain},
            {"wip_reference_height", p.locomotion.wip_reference_height},
            {"wip_max_speed", p.locomotion.wip_max_speed}}},
          {"zones",
           {{"danger_limit", p.warning.zones.danger_limit},
            {"warning_limit", p.warning.zones.warning_limit},
            {"prewarning_limit", p.warning.zones.prewarning_limit}}},
          {"warning", {{"fov_half_angle", p.warning.fov_half_angle}, {"gaze_half_angle", p.warning.gaze_half_angle}}},
          {"tracking",
           {{"kalman_q", p.kalman.q},
            {"kalman_r", p.kalman.r},
            {"speed_window", p.speed_window},
            {"rise_threshold", p.steps.rise_threshold},
            {"refractory", p.steps.refractory},
            {"pace_window", p.steps.pace_window},
            {"activity_timeout", p.steps.activity_timeout},
            {"baseline_window", p.steps.baseline_window},
            {"baseline_quantile", p.steps.baseline_quantile}}},
          {"sim", {{"collision_radius", cfg.sim.collision_radius}, {"tick", cfg.sim.tick}}},
          {"service",
           {{"max_ground_speed", cfg.max_ground_speed},
            {"max_march_rate", cfg.max_march_rate},
            {"max_turn_rate", cfg.max_turn_rate},
            {"walk_step_rate", cfg.walk_step_rate},
            {"walk_knee_lift", cfg.walk_knee_lift},
            {"march_knee_lift", cfg.march_knee_lift},
            {"noise_sigma", cfg.noise_sigma},
            {"seed", cfg.seed}}}};
}

inline ServiceConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace safewalk
