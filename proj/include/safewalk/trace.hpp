// Line-delimited JSON skeleton traces:
//   { "t": s, "chest": [x,y,z], "head": [x,y,z], "head_yaw": rad,
//     "knee_l": [x,y,z], "knee_r": [x,y,z] }

#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safewalk/tracking.hpp"

namespace safewalk {

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline nlohmann::json to_json(const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); }

inline nlohmann::json to_json(const SkeletonFrame& f) {
  return {{"t", f.t},
          {"chest", to_json(f.chest)},
          {"head", to_json(f.head)},
          {"head_yaw", f.head_yaw},
          {"knee_l", to_json(f.knee_left)},
          {"knee_r", to_json(f.knee_right)}};
}

namespace detail {

inline Vec3 vec3_from_json(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 3) throw TraceError(std::string(key) + " must be [x, y, z]");
  Vec3 out{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  if (!is_finite(out)) throw TraceError(std::string(key) + " is not finite");
  return out;
}

}  // namespace detail

inline SkeletonFrame frame_from_json(const nlohmann::json& j) {
  try {
    SkeletonFrame f;
    f.t = j.at("t").get<double>();
    f.chest = detail::vec3_from_json(j, "chest");
    f.head = detail::vec3_from_json(j, "head");
    f.head_yaw = j.at("head_yaw").get<double>();
    f.knee_left = detail::vec3_from_json(j, "knee_l");
    f.knee_right = detail::vec3_from_json(j, "knee_r");
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw TraceError(e.what());
  }
}

/// Reads a trace, rejecting malformed lines and non-increasing timestamps
/// with the offending 1-based line number.
inline std::vector<SkeletonFrame> read_trace(std::istream& in) {
  std::vector<SkeletonFrame> frames;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    SkeletonFrame f;
    try {
      f = frame_from_json(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      throw TraceError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!frames.empty() && !(f.t > frames.back().t)) {
      throw TraceError("trace line " + std::to_string(line_no) + ": non-monotone timestamp " +
                       std::to_string(f.t));
    }
    frames.push_back(f);
  }
  return frames;
}

inline std::vector<SkeletonFrame> load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open trace file " + path);
  return read_trace(in);
}

inline void write_trace(std::ostream& out, std::span<const SkeletonFrame> frames) {
  for (const auto& f : frames) out << to_json(f).dump() << '\n';
}

}  // namespace safewalk
