// Ground-plane geometry for the safety layer.
//
// Coordinate convention: y is up, the floor is the x-z plane. A yaw of 0
// faces +z and yaw grows counter-clockwise when viewed from above, so the
// heading for yaw `a` is (sin a, cos a) in (x, z) and a positive bearing
// means "to the person's left".

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace safewalk {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;  // vertical
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

/// Point or vector on the ground plane.
struct Vec2 {
  double x = 0.0;
  double z = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, z + o.z}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, z - o.z}; }
  Vec2 operator*(double s) const { return {x * s, z * s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    z += o.z;
    return *this;
  }
  double dot(Vec2 o) const { return x * o.x + z * o.z; }
  /// Positive when `o` is counter-clockwise from *this in the (x, z) plane.
  double cross(Vec2 o) const { return x * o.z - z * o.x; }
  double norm() const { return std::hypot(x, z); }

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 ground(const Vec3& v) { return {v.x, v.z}; }

inline bool is_finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.z); }
inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  double r = std::remainder(a, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

/// Unit heading on the ground plane for a yaw.
inline Vec2 heading(double yaw) { return {std::sin(yaw), std::cos(yaw)}; }

/// Yaw of a ground-plane direction (inverse of heading()).
inline double yaw_of(Vec2 dir) { return std::atan2(dir.x, dir.z); }

struct Pose2D {
  Vec2 position;
  double yaw = 0.0;  // (-pi, pi]

  Pose2D() = default;
  Pose2D(Vec2 p, double y) : position(p), yaw(normalize_angle(y)) {}
};

struct ObstacleBox {
  std::string id;
  Vec2 min;
  Vec2 max;
  double height = 1.0;
  std::string label;

  Vec2 center() const { return (min + max) * 0.5; }
  bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.z >= min.z && p.z <= max.z;
  }
};

struct LimitSegment {
  std::string id;
  Vec2 a;
  Vec2 b;
  Vec2 inside_normal;  // unit, points into the tracking area
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Vec2 nearest_hazard_point(Vec2 p, const ObstacleBox& o) {
  return {std::clamp(p.x, o.min.x, o.max.x), std::clamp(p.z, o.min.z, o.max.z)};
}

inline Vec2 nearest_hazard_point(Vec2 p, const LimitSegment& s) {
  const Vec2 ab = s.b - s.a;
  const double len2 = ab.dot(ab);
  const double u = len2 > 0.0 ? std::clamp((p - s.a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return s.a + ab * u;
}

/// Euclidean ground distance to the footprint; 0 inside or on it.
inline double distance_to_obstacle(Vec2 p, const ObstacleBox& o) {
  const double dx = std::max({o.min.x - p.x, 0.0, p.x - o.max.x});
  const double dz = std::max({o.min.z - p.z, 0.0, p.z - o.max.z});
  return std::hypot(dx, dz);
}

/// Distance to the clamped segment, positive on the inside-normal side and
/// negative past the limit.
inline double distance_to_limit(Vec2 p, const LimitSegment& s) {
  const double d = (p - nearest_hazard_point(p, s)).norm();
  return (p - s.a).dot(s.inside_normal) < 0.0 ? -d : d;
}

/// Bearing from the gaze heading to `target`, or nullopt when the target
/// coincides with the pose position.
inline std::optional<double> try_bearing_to(const Pose2D& pose, Vec2 target) {
  const Vec2 d = target - pose.position;
  if (d.x == 0.0 && d.z == 0.0) return std::nullopt;
  return normalize_angle(yaw_of(d) - pose.yaw);
}

inline double bearing_to(const Pose2D& pose, Vec2 target) {
  if (auto b = try_bearing_to(pose, target)) return *b;
  throw GeometryError("bearing_to: target coincides with pose position");
}

inline bool in_fov(double bearing, double half_angle) { return std::abs(bearing) <= half_angle; }

/// Signed area in the (x, z) coordinate plane (positive for counter-clockwise).
inline double signed_area(std::span<const Vec2> poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    a += poly[i].cross(poly[(i + 1) % poly.size()]);
  }
  return 0.5 * a;
}

inline Vec2 polygon_centroid(std::span<const Vec2> poly) {
  const double area = signed_area(poly);
  if (poly.empty()) return {};
  if (std::abs(area) < 1e-12) {
    Vec2 c;
    for (auto v : poly) c += v;
    return c * (1.0 / static_cast<double>(poly.size()));
  }
  Vec2 c;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i];
    const Vec2 q = poly[(i + 1) % poly.size()];
    const double w = p.cross(q);
    c += (p + q) * w;
  }
  return c * (1.0 / (6.0 * area));
}

inline bool on_segment(Vec2 p, Vec2 a, Vec2 b, double eps = 1e-12) {
  const Vec2 ab = b - a;
  if (std::abs(ab.cross(p - a)) > eps * std::max(1.0, ab.norm())) return false;
  return (p - a).dot(p - b) <= eps;
}

/// Crossing-number test; points on the boundary count as inside.
inline bool point_in_polygon(Vec2 p, std::span<const Vec2> poly) {
  if (poly.size() < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if (on_segment(p, a, b)) return true;
    if ((a.z > p.z) != (b.z > p.z)) {
      const double x_at = a.x + (p.z - a.z) * (b.x - a.x) / (b.z - a.z);
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

}  // namespace safewalk
