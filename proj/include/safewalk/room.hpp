// Room model: the tracking-area boundary and the obstacles inside it, plus
// the JSON room-file format.
//
//   { "name": "...",
//     "boundary": [[x, z], ...],
//     "obstacles": [{ "id", "min": [x, z], "max": [x, z], "height", "label" }] }

#pragma once

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safewalk/geometry.hpp"

namespace safewalk {

class RoomError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RoomModel {
  std::string name;
  std::vector<LimitSegment> boundary;
  std::vector<ObstacleBox> obstacles;

  /// Boundary vertices in chain order.
  std::vector<Vec2> polygon() const {
    std::vector<Vec2> out;
    out.reserve(boundary.size());
    for (const auto& s : boundary) out.push_back(s.a);
    return out;
  }

  Vec2 centroid() const {
    const auto poly = polygon();
    return polygon_centroid(poly);
  }

  bool contains(Vec2 p) const {
    const auto poly = polygon();
    return point_in_polygon(p, poly);
  }
};

/// Builds limit segments with inward normals from a vertex ring. Either
/// winding is accepted; the normals are derived from the signed area.
inline std::vector<LimitSegment> make_boundary(std::span<const Vec2> ring) {
  if (ring.size() < 3) throw RoomError("boundary needs at least 3 vertices");
  const double area = signed_area(ring);
  if (std::abs(area) < 1e-9) throw RoomError("boundary polygon has zero area");
  const bool ccw = area > 0.0;

  std::vector<LimitSegment> segs;
  segs.reserve(ring.size());
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[(i + 1) % ring.size()];
    const Vec2 d = b - a;
    const double len = d.norm();
    if (len == 0.0) {
      throw RoomError("boundary vertex " + std::to_string(i) + " repeats its successor");
    }
    // Left of the edge direction is the interior for a counter-clockwise ring.
    Vec2 n = Vec2{-d.z, d.x} * (1.0 / len);
    if (!ccw) n = n * -1.0;
    segs.push_back({"limit_" + std::to_string(i), a, b, n});
  }
  return segs;
}

namespace detail {

/// True when segment ab passes through the open interior of the footprint
/// (Liang-Barsky clip against the box).
inline bool crosses_interior(Vec2 a, Vec2 b, const ObstacleBox& o) {
  double t0 = 0.0;
  double t1 = 1.0;
  const Vec2 d = b - a;
  const double p[4] = {-d.x, d.x, -d.z, d.z};
  const double q[4] = {a.x - o.min.x, o.max.x - a.x, a.z - o.min.z, o.max.z - a.z};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] <= 0.0) return false;  // parallel and outside or on the edge line
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
  }
  if (t1 - t0 <= 1e-12) return false;
  const Vec2 mid = a + d * (0.5 * (t0 + t1));
  return mid.x > o.min.x && mid.x < o.max.x && mid.z > o.min.z && mid.z < o.max.z;
}

}  // namespace detail

/// Throws RoomError naming the first violated invariant.
inline void validate(const RoomModel& room) {
  if (room.boundary.size() < 3) throw RoomError("boundary needs at least 3 segments");
  for (std::size_t i = 0; i < room.boundary.size(); ++i) {
    const auto& s = room.boundary[i];
    const auto& next = room.boundary[(i + 1) % room.boundary.size()];
    if (!is_finite(s.a) || !is_finite(s.b)) throw RoomError("limit " + s.id + " is not finite");
    if (s.a == s.b) throw RoomError("limit " + s.id + " has coincident endpoints");
    if (std::abs(s.inside_normal.norm() - 1.0) > 1e-9) {
      throw RoomError("limit " + s.id + " normal is not unit length");
    }
    if (!(s.b == next.a)) throw RoomError("boundary is not a closed chain at limit " + s.id);
  }

  const auto poly = room.polygon();
  std::set<std::string> ids;
  for (const auto& s : room.boundary) ids.insert(s.id);
  for (const auto& o : room.obstacles) {
    if (!ids.insert(o.id).second) throw RoomError("duplicate hazard id " + o.id);
    if (!is_finite(o.min) || !is_finite(o.max) || !std::isfinite(o.height)) {
      throw RoomError("obstacle " + o.id + " is not finite");
    }
    if (!(o.min.x < o.max.x) || !(o.min.z < o.max.z)) {
      throw RoomError("obstacle " + o.id + " footprint has min >= max");
    }
    if (!(o.height > 0.0)) throw RoomError("obstacle " + o.id + " height must be positive");
    const Vec2 corners[] = {o.min, {o.max.x, o.min.z}, o.max, {o.min.x, o.max.z}};
    for (auto c : corners) {
      if (!point_in_polygon(c, poly)) {
        throw RoomError("obstacle " + o.id + " footprint lies outside the boundary");
      }
    }
    // A concave boundary can cut through a box whose corners are all inside.
    for (const auto& s : room.boundary) {
      if (detail::crosses_interior(s.a, s.b, o)) {
        throw RoomError("obstacle " + o.id + " footprint lies outside the boundary");
      }
    }
  }
}

/// The 3 m x 3 m tracking area with one corner at the origin.
inline RoomModel default_room() {
  const std::vector<Vec2> ring = {{0, 0}, {3, 0}, {3, 3}, {0, 3}};
  RoomModel room{"default 3x3", make_boundary(ring), {}};
  return room;
}

namespace detail {

inline Vec2 vec2_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw RoomError(what + " must be a [x, z] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline RoomModel room_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw RoomError("room must be a JSON object");
  RoomModel room;
  room.name = j.value("name", std::string{});
  if (!j.contains("boundary") || !j["boundary"].is_array()) {
    throw RoomError("room is missing a boundary array");
  }
  std::vector<Vec2> ring;
  for (std::size_t i = 0; i < j["boundary"].size(); ++i) {
    ring.push_back(detail::vec2_from_json(j["boundary"][i], "boundary[" + std::to_string(i) + "]"));
  }
  room.boundary = make_boundary(ring);
  if (j.contains("obstacles")) {
    for (const auto& o : j["obstacles"]) {
      ObstacleBox box;
      if (!o.contains("id")) throw RoomError("obstacle without id");
      box.id = o["id"].is_string() ? o["id"].get<std::string>() : o["id"].dump();
      if (!o.contains("min") || !o.contains("max")) {
        throw RoomError("obstacle " + box.id + " needs min and max");
      }
      box.min = detail::vec2_from_json(o["min"], "obstacle " + box.id + " min");
      box.max = detail::vec2_from_json(o["max"], "obstacle " + box.id + " max");
      box.height = o.value("height", 1.0);
      box.label = o.value("label", std::string{});
      room.obstacles.push_back(std::move(box));
    }
  }
  validate(room);
  return room;
}

inline nlohmann::json room_to_json(const RoomModel& room) {
  nlohmann::json boundary = nlohmann::json::array();
  for (const auto& s : room.boundary) boundary.push_back({s.a.x, s.a.z});
  nlohmann::json obstacles = nlohmann::json::array();
  for (const auto& o : room.obstacles) {
    obstacles.push_back({{"id", o.id},
                         {"min", {o.min.x, o.min.z}},
                         {"max", {o.max.x, o.max.z}},
                         {"height", o.height},
                         {"label", o.label}});
  }
  return {{"name", room.name}, {"boundary", boundary}, {"obstacles", obstacles}};
}

inline RoomModel load_room(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RoomError("cannot open room file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw RoomError("room file " + path + ": " + e.what());
  }
  return room_from_json(j);
}

}  // namespace safewalk
