// Skeleton tracking: per-joint Kalman smoothing, horizontal chest speed and
// knee-lift step detection.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "safewalk/geometry.hpp"

namespace safewalk {

struct SkeletonFrame {
  double t = 0.0;  // seconds, strictly increasing within a stream
  Vec3 head;
  Vec3 chest;
  Vec3 knee_left;
  Vec3 knee_right;
  double head_yaw = 0.0;
};

// ---------------------------------------------------------------------------
// Kalman smoothing
// ---------------------------------------------------------------------------

struct KalmanParams {
  double q = 1.0;            // white-acceleration intensity, (m/s^2)^2
  double r = 0.02 * 0.02;    // measurement variance, m^2
};

/// Symmetric 2x2 covariance over (position, velocity).
struct Cov2 {
  double pp = 0.0;
  double pv = 0.0;
  double vv = 0.0;
};

/// Constant-velocity filter state for one axis.
struct AxisFilter {
  double pos = 0.0;
  double vel = 0.0;
  Cov2 cov;
};

struct JointFilterState {
  std::array<AxisFilter, 3> axes{};  // x, y, z
  KalmanParams params;

  /// Starts at rest on the first measurement; velocity is initially unknown.
  static JointFilterState at(const Vec3& m, KalmanParams params = {}) {
    JointFilterState s;
    s.params = params;
    const double v[3] = {m.x, m.y, m.z};
    for (int i = 0; i < 3; ++i) {
      s.axes[i].pos = v[i];
      s.axes[i].vel = 0.0;
      s.axes[i].cov = {params.r, 0.0, 1.0};
    }
    return s;
  }

  Vec3 position() const { return {axes[0].pos, axes[1].pos, axes[2].pos}; }
  Vec3 velocity() const { return {axes[0].vel, axes[1].vel, axes[2].vel}; }
};

namespace detail {

inline void kalman_axis(AxisFilter& f, double z, double dt, const KalmanParams& p) {
  // Predict with F = [1 dt; 0 1] and the continuous white-acceleration Q.
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  f.pos += f.vel * dt;
  const Cov2 c = f.cov;
  Cov2 pr;
  pr.pp = c.pp + 2.0 * dt * c.pv + dt2 * c.vv + p.q * dt3 / 3.0;
  pr.pv = c.pv + dt * c.vv + p.q * dt2 / 2.0;
  pr.vv = c.vv + p.q * dt;

  // Update with H = [1 0]. Joseph form keeps the covariance PSD.
  const double s = pr.pp + p.r;
  const double k0 = pr.pp / s;
  const double k1 = pr.pv / s;
  const double innovation = z - f.pos;
  f.pos += k0 * innovation;
  f.vel += k1 * innovation;

  // (I - K H) P (I - K H)^T + K R K^T, expanded for the 2x2 case.
  const double a = 1.0 - k0;
  Cov2 post;
  post.pp = a * a * pr.pp + k0 * k0 * p.r;
  post.pv = a * (pr.pv - k1 * pr.pp) + k0 * k1 * p.r;
  post.vv = pr.vv - 2.0 * k1 * pr.pv + k1 * k1 * pr.pp + k1 * k1 * p.r;
  f.cov = post;
}

}  // namespace detail

/// One predict/update cycle per axis. Returns the smoothed position.
inline Vec3 kalman_update(JointFilterState& state, const Vec3& measurement, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("kalman_update: dt must be positive");
  const double z[3] = {measurement.x, measurement.y, measurement.z};
  for (int i = 0; i < 3; ++i) detail::kalman_axis(state.axes[i], z[i], dt, state.params);
  return state.position();
}

// ---------------------------------------------------------------------------
// Chest speed
// ---------------------------------------------------------------------------

struct MotionEstimate {
  double chest_speed_h = 0.0;  // m/s
  double window = 0.0;         // s
  bool warming_up = true;
};

/// Sliding history of the smoothed chest; speed is the horizontal
/// displacement across `window` seconds divided by the window.
class ChestSpeedEstimator {
 public:
  explicit ChestSpeedEstimator(double window = 0.5) : window_(window) {
    if (!(window > 0.0)) throw std::invalid_argument("chest speed window must be positive");
  }

  void push(double t, const Vec3& chest) {
    history_.push_back({t, ground(chest)});
    // Keep one sample at or before t - window for interpolation.
    while (history_.size() > 2 && history_[1].t <= t - window_) history_.pop_front();
  }

  MotionEstimate estimate(double now) const {
    MotionEstimate m;
    m.window = window_;
    if (history_.empty()) return m;
    const double from = now - window_;
    if (history_.front().t > from + 1e-9) return m;
    const auto end = position_at(now);
    const auto start = position_at(from);
    m.chest_speed_h = (end - start).norm() / window_;
    m.warming_up = false;
    return m;
  }

  double window() const { return window_; }

 private:
  struct Sample {
    double t;
    Vec2 p;
  };

  Vec2 position_at(double t) const {
    if (t <= history_.front().t) return history_.front().p;
    if (t >= history_.back().t) return history_.back().p;
    auto hi = std::lower_bound(history_.begin(), history_.end(), t,
                               [](const Sample& s, double v) { return s.t < v; });
    auto lo = std::prev(hi);
    const double u = (t - lo->t) / (hi->t - lo->t);
    return lo->p + (hi->p - lo->p) * u;
  }

  double window_;
  std::deque<Sample> history_;
};

// ---------------------------------------------------------------------------
// Step detection
// ---------------------------------------------------------------------------

enum class Knee { Left, Right };

struct StepEvent {
  double t = 0.0;
  Knee knee = Knee::Left;
  double peak_height = 0.0;  // above the knee's standing baseline
};

struct StepParams {
  double rise_threshold = 0.05;   // delta, m
  double refractory = 0.25;       // per knee, s
  double pace_window = 2.0;       // s
  double activity_timeout = 1.0;  // s
  double baseline_window = 5.0;   // s
  double baseline_quantile = 0.5;  // of knee height over the window
};

enum class LiftPhase { Below, Rising, Above };

struct StepOutput {
  std::vector<StepEvent> events;  // emitted this update
  double pace = 0.0;              // steps/s over both knees
  double last_peak_height = 0.0;  // max peak in the pace window
};

/// Per-knee lift detector. A lift starts at baseline + delta/2, counts once
/// it reaches baseline + delta, and is emitted as a step when the height falls
/// back under baseline + delta/2.
class StepDetector {
 public:
  explicit StepDetector(StepParams params = {}) : params_(params) {}

  StepOutput update(double t, double left_height, double right_height) {
    StepOutput out;
    update_knee(knees_[0], Knee::Left, t, left_height, out.events);
    update_knee(knees_[1], Knee::Right, t, right_height, out.events);
    for (const auto& e : out.events) recent_.push_back(e);
    std::sort(recent_.begin(), recent_.end(),
              [](const StepEvent& a, const StepEvent& b) { return a.t < b.t; });
    while (!recent_.empty() && recent_.front().t <= t - params_.pace_window) recent_.pop_front();
    out.pace = static_cast<double>(recent_.size()) / params_.pace_window;
    for (const auto& e : recent_) out.last_peak_height = std::max(out.last_peak_height, e.peak_height);
    return out;
  }

  std::optional<double> last_event_time() const { return last_event_; }

  bool is_stepping(double now) const {
    return last_event_.has_value() && now - *last_event_ <= params_.activity_timeout;
  }

  double baseline(Knee k) const { return knees_[k == Knee::Left ? 0 : 1].baseline; }
  LiftPhase phase(Knee k) const { return knees_[k == Knee::Left ? 0 : 1].phase; }
  const std::deque<StepEvent>& recent() const { return recent_; }
  const StepParams& params() const { return params_; }

 private:
  struct KneeTrack {
    std::deque<std::pair<double, double>> samples;  // (t, height)
    double baseline = 0.0;
    bool initialised = false;
    LiftPhase phase = LiftPhase::Below;
    double peak = 0.0;
    std::optional<double> last_event;
  };

  void update_knee(KneeTrack& k, Knee which, double t, double h, std::vector<StepEvent>& out) {
    k.samples.emplace_back(t, h);
    while (!k.samples.empty() && k.samples.front().first < t - params_.baseline_window) {
      k.samples.pop_front();
    }
    if (!k.initialised) {
      k.baseline = h;
      k.initialised = true;
    } else if (k.phase == LiftPhase::Below) {
      k.baseline = quantile_of(k.samples, params_.baseline_quantile);
    }

    const double lift = h - k.baseline;
    const double delta = params_.rise_threshold;
    switch (k.phase) {
      case LiftPhase::Below:
        if (lift >= delta) {
          k.phase = LiftPhase::Above;
          k.peak = lift;
        } else if (lift >= delta / 2) {
          k.phase = LiftPhase::Rising;
        }
        break;
      case LiftPhase::Rising:
        if (lift >= delta) {
          k.phase = LiftPhase::Above;
          k.peak = lift;
        } else if (lift < delta / 2) {
          k.phase = LiftPhase::Below;
        }
        break;
      case LiftPhase::Above:
        k.peak = std::max(k.peak, lift);
        if (lift < delta / 2) {
          k.phase = LiftPhase::Below;
          if (!k.last_event || t - *k.last_event >= params_.refractory) {
            out.push_back({t, which, k.peak});
            k.last_event = t;
            last_event_ = t;
          }
        }
        break;
    }
  }

  static double quantile_of(const std::deque<std::pair<double, double>>& samples, double q) {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.second);
    const auto idx = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
    return v[idx];
  }

  StepParams params_;
  std::array<KneeTrack, 2> knees_{};
  std::deque<StepEvent> recent_;
  std::optional<double> last_event_;
};

/// True iff a step was seen within the activity timeout.
inline bool is_stepping(std::optional<double> seconds_since_last_event, double timeout = 1.0) {
  return seconds_since_last_event.has_value() && *seconds_since_last_event <= timeout;
}

}  // namespace safewalk
