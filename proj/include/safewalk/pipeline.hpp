// Per-person frame pipeline: smoothing -> chest speed and steps ->
// locomotion state -> avatar -> warnings. Shared by the offline simulator and
// the live session host.

#pragma once

#include <memory>
#include <optional>

#include "safewalk/locomotion.hpp"
#include "safewalk/room.hpp"
#include "safewalk/tracking.hpp"
#include "safewalk/warning.hpp"

namespace safewalk {

struct PipelineConfig {
  KalmanParams kalman;
  double speed_window = 0.5;  // s
  StepParams steps;
  LocomotionConfig locomotion;
  WarningConfig warning;

  void validate() const {
    if (!(kalman.q > 0.0) || !(kalman.r > 0.0)) throw std::invalid_argument("kalman q and r must be positive");
    if (!(speed_window > 0.0)) throw std::invalid_argument("speed window must be positive");
    if (!(steps.rise_threshold > 0.0) || !(steps.pace_window > 0.0) || !(steps.refractory >= 0.0) ||
        !(steps.activity_timeout >= 0.0) || !(steps.baseline_window > 0.0) ||
        !(steps.baseline_quantile >= 0.0 && steps.baseline_quantile <= 1.0)) {
      throw std::invalid_argument("step detector parameters out of range");
    }
    locomotion.validate();
    warning.zones.validate();
    if (!(warning.fov_half_angle > 0.0 && warning.fov_half_angle < std::numbers::pi)) {
      throw std::invalid_argument("fov half-angle must lie in (0, pi)");
    }
    if (!(warning.gaze_half_angle > 0.0)) throw std::invalid_argument("gaze half-angle must be positive");
  }
};

struct PipelineOutput {
  double t = 0.0;
  Vec2 chest;     // measured chest ground projection
  Pose2D person;  // smoothed chest projection with gaze yaw
  MotionEstimate motion;
  double pace = 0.0;
  double peak_height = 0.0;
  bool stepping = false;
  double v_wip = 0.0;
  LocomotionState locomotion;
  AvatarPose avatar;
  WarningFrame warning;
};

class Pipeline {
 public:
  Pipeline(std::shared_ptr<const RoomModel> room, PipelineConfig cfg)
      : room_(std::move(room)), cfg_(cfg), speed_(cfg.speed_window), steps_(cfg.steps) {
    cfg_.validate();
    if (!room_) throw std::invalid_argument("pipeline needs a room");
  }

  /// Processes one frame. Timestamps must increase strictly.
  PipelineOutput step(const SkeletonFrame& f) {
    PipelineOutput out;
    out.t = f.t;
    out.chest = ground(f.chest);

    Vec3 chest;
    Vec3 knee_l;
    Vec3 knee_r;
    std::optional<double> dt;
    if (!last_t_) {
      chest_ = JointFilterState::at(f.chest, cfg_.kalman);
      head_ = JointFilterState::at(f.head, cfg_.kalman);
      knee_l_ = JointFilterState::at(f.knee_left, cfg_.kalman);
      knee_r_ = JointFilterState::at(f.knee_right, cfg_.kalman);
      chest = f.chest;
      knee_l = f.knee_left;
      knee_r = f.knee_right;
      avatar_.position = chest;
      avatar_.yaw = normalize_angle(f.head_yaw);
    } else {
      dt = f.t - *last_t_;
      if (!(*dt > 0.0)) throw std::invalid_argument("pipeline: timestamps must increase");
      chest = kalman_update(chest_, f.chest, *dt);
      kalman_update(head_, f.head, *dt);
      knee_l = kalman_update(knee_l_, f.knee_left, *dt);
      knee_r = kalman_update(knee_r_, f.knee_right, *dt);
    }

    speed_.push(f.t, chest);
    out.motion = speed_.estimate(f.t);
    const auto steps = steps_.update(f.t, knee_l.y, knee_r.y);
    out.pace = steps.pace;
    out.peak_height = steps.last_peak_height;
    out.stepping = steps_.is_stepping(f.t);
    out.v_wip = wip_virtual_speed(out.pace, out.peak_height, cfg_.locomotion);

    // The mode decided on this tick already governs this tick's avatar motion.
    if (dt) {
      state_ = cwip_transition(state_, out.motion.chest_speed_h, out.stepping, *dt, cfg_.locomotion);
      const Vec2 moved = ground(chest) - last_chest_;
      avatar_ = integrate_avatar(avatar_, state_.mode, moved, f.head_yaw, out.v_wip, *dt);
    } else {
      state_.mode = out.stepping ? LocomotionMode::WalkingInPlace : LocomotionMode::Stationary;
    }
    out.locomotion = state_;
    out.avatar = avatar_;

    out.person = Pose2D(ground(chest), f.head_yaw);
    out.warning = compose_warning_frame(out.person, *room_, cfg_.warning, alert_, f.t);

    last_t_ = f.t;
    last_chest_ = ground(chest);
    return out;
  }

  const RoomModel& room() const { return *room_; }
  const PipelineConfig& config() const { return cfg_; }
  const AlertState& alert() const { return alert_; }

 private:
  std::shared_ptr<const RoomModel> room_;
  PipelineConfig cfg_;
  JointFilterState chest_;
  JointFilterState head_;
  JointFilterState knee_l_;
  JointFilterState knee_r_;
  ChestSpeedEstimator speed_;
  StepDetector steps_;
  LocomotionState state_;
  AvatarPose avatar_;
  AlertState alert_;
  std::optional<double> last_t_;
  Vec2 last_chest_;
};

}  // namespace safewalk
