// Proximity warnings: zones, indicator colours, off-view arrows and the
// sound-alert state machine.

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "safewalk/geometry.hpp"
#include "safewalk/room.hpp"

namespace safewalk {

/// Ordered nearest-first: Danger < Warning < PreWarning < Normal.
enum class Zone { Danger = 0, Warning = 1, PreWarning = 2, Normal = 3 };

inline std::string_view to_string(Zone z) {
  switch (z) {
    case Zone::Danger: return "danger";
    case Zone::Warning: return "warning";
    case Zone::PreWarning: return "pre_warning";
    case Zone::Normal: return "normal";
  }
  return "?";
}

inline Zone zone_from_string(std::string_view s) {
  if (s == "danger") return Zone::Danger;
  if (s == "warning") return Zone::Warning;
  if (s == "pre_warning") return Zone::PreWarning;
  if (s == "normal") return Zone::Normal;
  throw std::invalid_argument("unknown zone: " + std::string(s));
}

struct Rgba {
  double r = 1.0;
  double g = 1.0;
  double b = 1.0;
  double a = 0.0;

  friend bool operator==(const Rgba&, const Rgba&) = default;
};

struct ZoneConfig {
  // Upper limits of each zone, in metres from the hazard.
  double danger_limit = 0.40;      // half step plus safety margin
  double warning_limit = 0.80;     // one step
  double prewarning_limit = 1.20;  // a step and a half
  // Reference figures the limits were sized from. Not used in the math.
  double step_length_min = 0.70;
  double step_length_max = 0.75;
  double safety_margin = 0.20;
  // Indicator anchors: white/clear -> yellow/semi -> red/almost opaque.
  Rgba far_color{1.0, 1.0, 1.0, 0.0};
  Rgba mid_color{1.0, 1.0, 0.0, 0.5};
  Rgba near_color{1.0, 0.0, 0.0, 0.9};

  void validate() const {
    if (!(danger_limit > 0.0 && danger_limit < warning_limit && warning_limit < prewarning_limit)) {
      throw std::invalid_argument("zone limits must satisfy 0 < danger < warning < prewarning");
    }
  }
};

struct WarningConfig {
  ZoneConfig zones;
  double fov_half_angle = std::numbers::pi / 4.0;    // 45 degrees
  double gaze_half_angle = std::numbers::pi / 12.0;  // 15 degrees
};

/// Half-open, lower-inclusive bands; negative distances are Danger.
inline Zone classify_zone(double distance, const ZoneConfig& cfg = {}) {
  if (distance < cfg.danger_limit) return Zone::Danger;
  if (distance < cfg.warning_limit) return Zone::Warning;
  if (distance < cfg.prewarning_limit) return Zone::PreWarning;
  return Zone::Normal;
}

struct IndicatorAppearance {
  bool visible = false;
  Rgba rgba;
};

namespace detail {

inline Rgba lerp(const Rgba& from, const Rgba& to, double s) {
  return {from.r + (to.r - from.r) * s, from.g + (to.g - from.g) * s,
          from.b + (to.b - from.b) * s, from.a + (to.a - from.a) * s};
}

}  // namespace detail

inline IndicatorAppearance indicator_appearance(double distance, const ZoneConfig& cfg = {}) {
  switch (classify_zone(distance, cfg)) {
    case Zone::Normal:
      return {false, cfg.far_color};
    case Zone::PreWarning: {
      const double s = (cfg.prewarning_limit - distance) / (cfg.prewarning_limit - cfg.warning_limit);
      return {true, detail::lerp(cfg.far_color, cfg.mid_color, s)};
    }
    case Zone::Warning: {
      const double s = (cfg.warning_limit - distance) / (cfg.warning_limit - cfg.danger_limit);
      return {true, detail::lerp(cfg.mid_color, cfg.near_color, s)};
    }
    case Zone::Danger:
      return {true, cfg.near_color};
  }
  return {};
}

enum class HazardKind { Limit, Obstacle };
enum class Side { Left, Right };

inline std::string_view to_string(HazardKind k) { return k == HazardKind::Limit ? "limit" : "obstacle"; }
inline std::string_view to_string(Side s) { return s == Side::Left ? "left" : "right"; }

struct HazardStatus {
  std::string id;
  HazardKind kind = HazardKind::Obstacle;
  double distance = 0.0;
  Zone zone = Zone::Normal;
  double bearing = 0.0;  // to the nearest hazard point
  bool in_fov = true;
  IndicatorAppearance appearance;
};

struct Arrow {
  std::string id;
  Side side = Side::Right;
};

/// Arrow toward an out-of-view hazard that is at PreWarning range or closer.
/// A bearing of exactly pi (straight behind) points right.
inline std::optional<Side> offscreen_arrow(const HazardStatus& status) {
  if (status.in_fov || status.zone == Zone::Normal) return std::nullopt;
  return status.bearing > 0.0 && status.bearing < std::numbers::pi ? Side::Left : Side::Right;
}

struct AlertState {
  std::set<std::string> ringing;
  // Hazards the person looked at while in Danger; silent until they leave.
  std::set<std::string> acknowledged;

  friend bool operator==(const AlertState&, const AlertState&) = default;
};

/// Advances the sound alerts. Per hazard:
///  - outside Danger: not ringing, acknowledgement cleared;
///  - in Danger and gazed at (within gaze_half_angle): silenced and acknowledged;
///  - in Danger, out of view, not acknowledged: ringing;
///  - otherwise a ringing hazard keeps ringing.
inline AlertState sound_alert_step(AlertState alert, const std::vector<HazardStatus>& statuses,
                                   double gaze_half_angle = std::numbers::pi / 12.0) {
  std::set<std::string> present;
  for (const auto& s : statuses) {
    present.insert(s.id);
    if (s.zone != Zone::Danger) {
      alert.ringing.erase(s.id);
      alert.acknowledged.erase(s.id);
      continue;
    }
    if (std::abs(s.bearing) <= gaze_half_angle) {
      alert.ringing.erase(s.id);
      alert.acknowledged.insert(s.id);
    } else if (!s.in_fov && !alert.acknowledged.contains(s.id)) {
      alert.ringing.insert(s.id);
    }
  }
  std::erase_if(alert.ringing, [&](const std::string& id) { return !present.contains(id); });
  std::erase_if(alert.acknowledged, [&](const std::string& id) { return !present.contains(id); });
  return alert;
}

struct WarningFrame {
  double t = 0.0;
  std::vector<HazardStatus> hazards;
  std::vector<Arrow> arrows;
  bool sound_on = false;
};

namespace detail {

inline HazardStatus make_status(const Pose2D& pose, std::string id, HazardKind kind, double distance,
                                Vec2 nearest, Vec2 fallback_target, const WarningConfig& cfg) {
  HazardStatus s;
  s.id = std::move(id);
  s.kind = kind;
  s.distance = distance;
  s.zone = classify_zone(distance, cfg.zones);
  // Standing on the hazard: aim at its body instead.
  auto bearing = try_bearing_to(pose, nearest);
  if (!bearing) bearing = try_bearing_to(pose, fallback_target);
  s.bearing = bearing.value_or(0.0);
  s.in_fov = in_fov(s.bearing, cfg.fov_half_angle);
  s.appearance = indicator_appearance(distance, cfg.zones);
  return s;
}

}  // namespace detail

inline HazardStatus evaluate_limit(const Pose2D& pose, const LimitSegment& s, const WarningConfig& cfg) {
  const Vec2 p = pose.position;
  return detail::make_status(pose, s.id, HazardKind::Limit, distance_to_limit(p, s),
                             nearest_hazard_point(p, s), p - s.inside_normal, cfg);
}

inline HazardStatus evaluate_obstacle(const Pose2D& pose, const ObstacleBox& o, const WarningConfig& cfg) {
  const Vec2 p = pose.position;
  return detail::make_status(pose, o.id, HazardKind::Obstacle, distance_to_obstacle(p, o),
                             nearest_hazard_point(p, o), o.center(), cfg);
}

/// Evaluates every limit and obstacle, derives arrows and advances `alert`.
inline WarningFrame compose_warning_frame(const Pose2D& pose, const RoomModel& room,
                                          const WarningConfig& cfg, AlertState& alert, double t) {
  WarningFrame frame;
  frame.t = t;
  frame.hazards.reserve(room.boundary.size() + room.obstacles.size());
  for (const auto& s : room.boundary) frame.hazards.push_back(evaluate_limit(pose, s, cfg));
  for (const auto& o : room.obstacles) frame.hazards.push_back(evaluate_obstacle(pose, o, cfg));
  for (const auto& h : frame.hazards) {
    if (auto side = offscreen_arrow(h)) frame.arrows.push_back({h.id, *side});
  }
  alert = sound_alert_step(std::move(alert), frame.hazards, cfg.gaze_half_angle);
  frame.sound_on = !alert.ringing.empty();
  return frame;
}

inline nlohmann::json to_json(const WarningFrame& f) {
  nlohmann::json hazards = nlohmann::json::array();
  for (const auto& h : f.hazards) {
    const auto& c = h.appearance.rgba;
    hazards.push_back({{"id", h.id},
                       {"kind", to_string(h.kind)},
                       {"distance", h.distance},
                       {"zone", to_string(h.zone)},
                       {"bearing", h.bearing},
                       {"in_fov", h.in_fov},
                       {"rgba", {c.r, c.g, c.b, c.a}}});
  }
  nlohmann::json arrows = nlohmann::json::array();
  for (const auto& a : f.arrows) arrows.push_back({{"id", a.id}, {"side", to_string(a.side)}});
  return {{"t", f.t}, {"hazards", hazards}, {"arrows", arrows}, {"sound_on", f.sound_on}};
}

inline WarningFrame warning_frame_from_json(const nlohmann::json& j) {
  WarningFrame f;
  f.t = j.at("t").get<double>();
  for (const auto& h : j.at("hazards")) {
    HazardStatus s;
    s.id = h.at("id").get<std::string>();
    s.kind = h.at("kind").get<std::string>() == "limit" ? HazardKind::Limit : HazardKind::Obstacle;
    s.distance = h.at("distance").get<double>();
    s.zone = zone_from_string(h.at("zone").get<std::string>());
    s.bearing = h.at("bearing").get<double>();
    s.in_fov = h.at("in_fov").get<bool>();
    const auto& c = h.at("rgba");
    s.appearance = {s.zone != Zone::Normal,
                    {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>(),
                     c.at(3).get<double>()}};
    f.hazards.push_back(std::move(s));
  }
  for (const auto& a : j.at("arrows")) {
    f.arrows.push_back({a.at("id").get<std::string>(),
                        a.at("side").get<std::string>() == "left" ? Side::Left : Side::Right});
  }
  f.sound_on = j.at("sound_on").get<bool>();
  return f;
}

}  // namespace safewalk
