// Synthetic skeleton streams standing in for the depth-camera tracker.
//
// GaitSynthesizer produces one frame at a time from a motion intent, so the
// live session and the offline generator share the same body model.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "safewalk/geometry.hpp"
#include "safewalk/tracking.hpp"

namespace safewalk {

struct BodyParams {
  double chest_height = 1.30;
  double head_height = 1.65;
  double knee_height = 0.50;
  double hip_half_width = 0.10;  // lateral knee offset from the chest line
  double sway = 0.02;            // lateral chest sway amplitude while stepping, m
  double bob = 0.01;             // vertical chest bob per step, m
};

/// What the simulated person is doing during one frame.
struct MotionIntent {
  Vec2 velocity;           // true ground velocity, m/s
  double yaw = 0.0;        // gaze heading
  double step_rate = 0.0;  // steps/s over both knees
  double knee_lift = 0.0;  // m above standing knee height
};

class GaitSynthesizer {
 public:
  GaitSynthesizer(Vec2 start, double yaw, double noise_sigma, std::uint64_t seed, BodyParams body = {})
      : position_(start), yaw_(normalize_angle(yaw)), noise_sigma_(noise_sigma), body_(body), rng_(seed) {
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
  }

  /// Emits the frame at the current time, then advances the true state by dt.
  SkeletonFrame emit(const MotionIntent& intent, double dt) {
    yaw_ = normalize_angle(intent.yaw);
    const double lift_l = intent.knee_lift * std::max(0.0, std::sin(phase_));
    const double lift_r = intent.knee_lift * std::max(0.0, -std::sin(phase_));
    const double stepping = intent.step_rate > 0.0 ? 1.0 : 0.0;

    const Vec2 fwd = heading(yaw_);
    const Vec2 right{-fwd.z, fwd.x};
    const Vec2 chest2 = position_ + right * (stepping * body_.sway * std::sin(phase_));
    const double chest_y = body_.chest_height + stepping * body_.bob * std::abs(std::sin(phase_));

    SkeletonFrame f;
    f.t = t_;
    f.chest = noisy({chest2.x, chest_y, chest2.z});
    f.head = noisy({chest2.x, chest_y + body_.head_height - body_.chest_height, chest2.z});
    const Vec2 kl = position_ - right * body_.hip_half_width;
    const Vec2 kr = position_ + right * body_.hip_half_width;
    f.knee_left = noisy({kl.x, body_.knee_height + lift_l, kl.z});
    f.knee_right = noisy({kr.x, body_.knee_height + lift_r, kr.z});
    f.head_yaw = yaw_;

    position_ += intent.velocity * dt;
    // One step per half cycle: the left knee lifts on the positive half of
    // sin(phase), the right on the negative half.
    phase_ = std::fmod(phase_ + std::numbers::pi * intent.step_rate * dt, 2.0 * std::numbers::pi);
    t_ += dt;
    return f;
  }

  Vec2 position() const { return position_; }
  double yaw() const { return yaw_; }
  double time() const { return t_; }

 private:
  Vec3 noisy(Vec3 v) {
    if (noise_sigma_ == 0.0) return v;
    return {v.x + noise_(rng_) * noise_sigma_, v.y + noise_(rng_) * noise_sigma_,
            v.z + noise_(rng_) * noise_sigma_};
  }

  Vec2 position_;
  double yaw_;
  double noise_sigma_;
  BodyParams body_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
  double phase_ = 0.0;
  double t_ = 0.0;
};

enum class GaitKind { Stationary, NaturalWalk, WalkInPlace, MixedScript };

inline std::string_view to_string(GaitKind k) {
  switch (k) {
    case GaitKind::Stationary: return "stationary";
    case GaitKind::NaturalWalk: return "natural_walk";
    case GaitKind::WalkInPlace: return "walk_in_place";
    case GaitKind::MixedScript: return "mixed_script";
  }
  return "?";
}

inline GaitKind gait_kind_from_string(std::string_view s) {
  if (s == "stationary") return GaitKind::Stationary;
  if (s == "natural_walk") return GaitKind::NaturalWalk;
  if (s == "walk_in_place") return GaitKind::WalkInPlace;
  if (s == "mixed_script") return GaitKind::MixedScript;
  throw std::invalid_argument("unknown gait kind: " + std::string(s));
}

struct ScriptSegment {
  GaitKind kind = GaitKind::Stationary;  // not MixedScript
  double duration = 1.0;
};

struct GaitParams {
  GaitKind kind = GaitKind::Stationary;
  std::vector<Vec2> path;       // walking waypoints
  bool loop_path = false;       // keep circling the path instead of stopping at its end
  Vec2 start{1.5, 1.5};         // used when there is no path
  double yaw = 0.0;             // initial heading when not walking
  double duration = 10.0;       // s, ignored for mixed scripts
  double ground_speed = 1.2;    // m/s while walking
  double step_rate = 2.0;       // steps/s
  double knee_lift = 0.20;      // m while marching in place
  double walk_knee_lift = 0.08; // m while walking
  double drift_speed = 0.05;    // m/s chest drift while marching (< 0.1)
  double noise_sigma = 0.0;     // m, per axis
  double frame_rate = 30.0;     // Hz
  std::uint64_t seed = 1;
  BodyParams body;
  std::vector<ScriptSegment> script;

  void validate() const {
    if (!(frame_rate > 0.0)) throw std::invalid_argument("frame_rate must be positive");
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
    if (!(ground_speed >= 0.0) || !(step_rate >= 0.0) || !(knee_lift >= 0.0) || !(drift_speed >= 0.0)) {
      throw std::invalid_argument("gait speeds and rates must be >= 0");
    }
    if (drift_speed >= 0.1) throw std::invalid_argument("in-place drift must stay below 0.1 m/s");
    const bool walks = kind == GaitKind::NaturalWalk ||
                       (kind == GaitKind::MixedScript &&
                        std::any_of(script.begin(), script.end(),
                                    [](const ScriptSegment& s) { return s.kind == GaitKind::NaturalWalk; }));
    if (walks && path.empty()) throw std::invalid_argument("natural_walk needs a non-empty path");
    if (kind == GaitKind::MixedScript) {
      if (script.empty()) throw std::invalid_argument("mixed_script needs at least one segment");
      for (const auto& s : script) {
        if (s.kind == GaitKind::MixedScript) throw std::invalid_argument("script segments cannot nest");
        if (!(s.duration > 0.0)) throw std::invalid_argument("script segment duration must be positive");
      }
    }
  }
};

namespace detail {

/// Walks a polyline at constant speed, optionally closing it into a loop.
class PathFollower {
 public:
  PathFollower(std::vector<Vec2> path, bool loop) : path_(std::move(path)), loop_(loop) {}

  /// Velocity for the next dt and the heading to face. Zero velocity at the
  /// end of an open path.
  std::pair<Vec2, double> advance(Vec2 from, double speed, double dt, double yaw) {
    if (path_.size() < 2 || speed <= 0.0) return {{}, yaw};
    double remaining = speed * dt;
    Vec2 p = from;
    double face = yaw;
    std::size_t empty_hops = 0;
    while (remaining > 1e-12 && empty_hops <= path_.size()) {
      if (target_ >= path_.size()) {
        if (!loop_) break;
        target_ = 0;
      }
      const Vec2 d = path_[target_] - p;
      const double len = d.norm();
      if (len < 1e-12) {
        ++target_;
        ++empty_hops;
        continue;
      }
      empty_hops = 0;
      face = yaw_of(d);
      if (len <= remaining) {
        p = path_[target_];
        remaining -= len;
        ++target_;
      } else {
        p += d * (remaining / len);
        remaining = 0.0;
      }
    }
    return {(p - from) * (1.0 / dt), face};
  }

 private:
  std::vector<Vec2> path_;
  bool loop_;
  std::size_t target_ = 1;
};

}  // namespace detail

/// Deterministic skeleton trace for the given parameters.
inline std::vector<SkeletonFrame> generate_gait(const GaitParams& params) {
  params.validate();
  std::vector<ScriptSegment> segments =
      params.kind == GaitKind::MixedScript ? params.script
                                           : std::vector<ScriptSegment>{{params.kind, params.duration}};

  const Vec2 start = params.path.empty() ? params.start : params.path.front();
  double yaw = params.yaw;
  if (params.path.size() >= 2) yaw = yaw_of(params.path[1] - params.path[0]);

  GaitSynthesizer synth(start, yaw, params.noise_sigma, params.seed, params.body);
  detail::PathFollower follower(params.path, params.loop_path);
  // Drift direction is fixed per seed, drawn from a separate stream.
  std::mt19937_64 drift_rng(params.seed ^ 0x9e3779b97f4a7c15ULL);
  const double drift_yaw = std::uniform_real_distribution<double>(-std::numbers::pi, std::numbers::pi)(drift_rng);

  const double dt = 1.0 / params.frame_rate;
  std::vector<SkeletonFrame> frames;
  double seg_end = 0.0;
  std::size_t frame_index = 0;
  for (const auto& seg : segments) {
    seg_end += seg.duration;
    // Frame i sits at i * dt; integer indexing avoids accumulating drift.
    while (static_cast<double>(frame_index) * dt < seg_end - 1e-9) {
      MotionIntent intent;
      intent.yaw = yaw;
      switch (seg.kind) {
        case GaitKind::NaturalWalk: {
          auto [vel, face] = follower.advance(synth.position(), params.ground_speed, dt, yaw);
          intent.velocity = vel;
          intent.yaw = yaw = face;
          if (vel.norm() > 0.0) {
            intent.step_rate = params.step_rate;
            intent.knee_lift = params.walk_knee_lift;
          }
          break;
        }
        case GaitKind::WalkInPlace:
          intent.velocity = heading(drift_yaw) * params.drift_speed;
          intent.step_rate = params.step_rate;
          intent.knee_lift = params.knee_lift;
          break;
        default:
          break;
      }
      frames.push_back(synth.emit(intent, dt));
      frames.back().t = static_cast<double>(frame_index) * dt;
      ++frame_index;
    }
  }
  return frames;
}

}  // namespace safewalk
