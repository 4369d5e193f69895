// Combined locomotion: switches between standing, natural walking and
// walking in place, and moves the avatar accordingly.

#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <string_view>

#include "safewalk/geometry.hpp"

namespace safewalk {

enum class LocomotionMode { Stationary, NaturalWalking, WalkingInPlace };

inline std::string_view to_string(LocomotionMode m) {
  switch (m) {
    case LocomotionMode::Stationary: return "stationary";
    case LocomotionMode::NaturalWalking: return "natural_walking";
    case LocomotionMode::WalkingInPlace: return "walking_in_place";
  }
  return "?";
}

inline LocomotionMode locomotion_mode_from_string(std::string_view s) {
  if (s == "stationary") return LocomotionMode::Stationary;
  if (s == "natural_walking") return LocomotionMode::NaturalWalking;
  if (s == "walking_in_place") return LocomotionMode::WalkingInPlace;
  throw std::invalid_argument("unknown locomotion mode: " + std::string(s));
}

struct LocomotionConfig {
  double v_t = 0.80;           // m/s, walking threshold
  double exit_margin = 0.10;   // m/s below v_t required to leave walking
  int enter_frames = 3;        // consecutive ticks above v_t
  double exit_dwell = 0.3;     // s below v_t - exit_margin
  double wip_gain = 0.5;       // m per step
  double wip_reference_height = 0.25;  // m
  double wip_max_speed = 2.0;  // m/s

  void validate() const {
    if (!(exit_margin > 0.0) || !(v_t > exit_margin)) {
      throw std::invalid_argument("locomotion config requires v_t > exit_margin > 0");
    }
    if (enter_frames < 1 || !(exit_dwell >= 0.0) || !(wip_gain > 0.0) ||
        !(wip_reference_height > 0.0) || !(wip_max_speed > 0.0)) {
      throw std::invalid_argument("locomotion gains must be positive");
    }
  }
};

struct LocomotionState {
  LocomotionMode mode = LocomotionMode::Stationary;
  int frames_above_threshold = 0;
  double time_below_exit_threshold = 0.0;

  friend bool operator==(const LocomotionState&, const LocomotionState&) = default;
};

/// Advances the state machine by one tick.
///
/// Walking is entered after `enter_frames` consecutive ticks with speed above
/// v_t and left once speed has stayed under v_t - exit_margin for
/// `exit_dwell` seconds. Outside walking the mode follows the stepping flag.
inline LocomotionState cwip_transition(LocomotionState s, double speed, bool stepping, double dt,
                                       const LocomotionConfig& cfg) {
  if (!(dt > 0.0)) throw std::invalid_argument("cwip_transition: dt must be positive");
  const auto rest_mode = stepping ? LocomotionMode::WalkingInPlace : LocomotionMode::Stationary;

  if (s.mode == LocomotionMode::NaturalWalking) {
    if (speed < cfg.v_t - cfg.exit_margin) {
      s.time_below_exit_threshold += dt;
      // Accumulated tick sums drift by a few ulps.
      if (s.time_below_exit_threshold + 1e-9 >= cfg.exit_dwell) {
        return {rest_mode, 0, 0.0};
      }
    } else {
      s.time_below_exit_threshold = 0.0;
    }
    return s;
  }

  s.frames_above_threshold = speed > cfg.v_t ? s.frames_above_threshold + 1 : 0;
  if (s.frames_above_threshold >= cfg.enter_frames) {
    return {LocomotionMode::NaturalWalking, 0, 0.0};
  }
  s.mode = rest_mode;
  return s;
}

/// Virtual forward speed while marching, linear in pace and in knee lift
/// relative to the reference height.
inline double wip_virtual_speed(double pace, double peak_height, const LocomotionConfig& cfg) {
  if (pace <= 0.0 || peak_height <= 0.0) return 0.0;
  const double v = cfg.wip_gain * pace * (peak_height / cfg.wip_reference_height);
  return std::min(cfg.wip_max_speed, v);
}

struct AvatarPose {
  Vec3 position;
  double yaw = 0.0;
};

/// Real displacement always maps 1:1; walking in place adds v_wip * dt along
/// the gaze heading.
inline AvatarPose integrate_avatar(AvatarPose pose, LocomotionMode mode, Vec2 real_displacement,
                                   double real_yaw, double v_wip, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_avatar: dt must be positive");
  pose.yaw = normalize_angle(real_yaw);
  Vec2 step = real_displacement;
  if (mode == LocomotionMode::WalkingInPlace) step += heading(pose.yaw) * (v_wip * dt);
  pose.position.x += step.x;
  pose.position.z += step.z;
  return pose;
}

}  // namespace safewalk
