// Trace-driven simulation: runs the pipeline over a skeleton trace, writes a
// line-delimited JSON frame log and counts boundary exits and obstacle hits.

#pragma once

#include <array>
#include <istream>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safewalk/pipeline.hpp"
#include "safewalk/room.hpp"
#include "safewalk/tracking.hpp"

namespace safewalk {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  PipelineConfig pipeline;
  double collision_radius = 0.20;  // m, body cylinder around the chest
  double tick = 1.0 / 30.0;        // s, live-session tick

  void validate() const {
    pipeline.validate();
    if (!(collision_radius > 0.0)) throw std::invalid_argument("collision radius must be positive");
    if (!(tick > 0.0)) throw std::invalid_argument("tick must be positive");
  }
};

struct MetricsReport {
  double task_time = 0.0;
  int runs_with_exit = 0;
  int total_exits = 0;
  int runs_with_hit = 0;
  int total_hits = 0;
  std::array<long, 3> mode_histogram{};  // indexed by LocomotionMode

  MetricsReport& operator+=(const MetricsReport& o) {
    task_time += o.task_time;
    runs_with_exit += o.runs_with_exit;
    total_exits += o.total_exits;
    runs_with_hit += o.runs_with_hit;
    total_hits += o.total_hits;
    for (std::size_t i = 0; i < mode_histogram.size(); ++i) mode_histogram[i] += o.mode_histogram[i];
    return *this;
  }

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

inline nlohmann::json to_json(const MetricsReport& m) {
  nlohmann::json hist = nlohmann::json::object();
  for (auto mode : {LocomotionMode::Stationary, LocomotionMode::NaturalWalking, LocomotionMode::WalkingInPlace}) {
    hist[std::string(to_string(mode))] = m.mode_histogram[static_cast<std::size_t>(mode)];
  }
  return {{"task_time", m.task_time},         {"runs_with_exit", m.runs_with_exit},
          {"total_exits", m.total_exits},     {"runs_with_hit", m.runs_with_hit},
          {"total_hits", m.total_hits},       {"mode_histogram", hist}};
}

struct FrameEvents {
  bool inside = true;
  bool exit = false;
  std::vector<std::string> hits;
};

/// Counts inside-to-outside crossings of the boundary and new contacts of
/// the body cylinder with obstacle footprints. The first frame only seeds the
/// state, so splitting a run at a shared frame keeps the counts additive.
class MetricsTracker {
 public:
  MetricsTracker(std::shared_ptr<const RoomModel> room, double collision_radius)
      : room_(std::move(room)), polygon_(room_->polygon()), radius_(collision_radius) {}

  FrameEvents observe(double t, Vec2 chest, LocomotionMode mode) {
    FrameEvents ev;
    ev.inside = point_in_polygon(chest, polygon_);
    std::set<std::string> contact;
    for (const auto& o : room_->obstacles) {
      if (distance_to_obstacle(chest, o) <= radius_) contact.insert(o.id);
    }
    if (frames_ == 0) {
      first_t_ = t;
    } else {
      if (was_inside_ && !ev.inside) {
        ev.exit = true;
        ++report_.total_exits;
      }
      for (const auto& id : contact) {
        if (!in_contact_.contains(id)) {
          ev.hits.push_back(id);
          ++report_.total_hits;
        }
      }
    }
    was_inside_ = ev.inside;
    in_contact_ = std::move(contact);
    ++report_.mode_histogram[static_cast<std::size_t>(mode)];
    report_.task_time = t - first_t_;
    report_.runs_with_exit = report_.total_exits > 0 ? 1 : 0;
    report_.runs_with_hit = report_.total_hits > 0 ? 1 : 0;
    ++frames_;
    return ev;
  }

  const MetricsReport& report() const { return report_; }

 private:
  std::shared_ptr<const RoomModel> room_;
  std::vector<Vec2> polygon_;
  double radius_;
  MetricsReport report_;
  bool was_inside_ = true;
  std::set<std::string> in_contact_;
  double first_t_ = 0.0;
  std::size_t frames_ = 0;
};

/// One frame-log record: warning frame, poses, mode and metric events.
inline nlohmann::json frame_record(std::uint64_t tick, const PipelineOutput& out, const FrameEvents& ev) {
  return {{"tick", tick},
          {"t", out.t},
          {"mode", to_string(out.locomotion.mode)},
          {"chest", {out.chest.x, out.chest.z}},
          {"person", {{"x", out.person.position.x}, {"z", out.person.position.z}, {"yaw", out.person.yaw}}},
          {"avatar",
           {{"x", out.avatar.position.x},
            {"y", out.avatar.position.y},
            {"z", out.avatar.position.z},
            {"yaw", out.avatar.yaw}}},
          {"speed", out.motion.chest_speed_h},
          {"warming_up", out.motion.warming_up},
          {"pace", out.pace},
          {"stepping", out.stepping},
          {"v_wip", out.v_wip},
          {"inside", ev.inside},
          {"events", {{"exit", ev.exit}, {"hits", ev.hits}}},
          {"warning", to_json(out.warning)}};
}

struct RunResult {
  MetricsReport metrics;
  std::vector<std::string> log;  // one JSON record per frame
};

inline RunResult run_trace(const SimConfig& cfg, std::shared_ptr<const RoomModel> room,
                           std::span<const SkeletonFrame> trace) {
  cfg.validate();
  if (trace.empty()) throw SimError("trace is empty");
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (!(trace[i].t > trace[i - 1].t)) {
      throw SimError("non-monotone timestamp at line " + std::to_string(i + 1) + " (t=" +
                     std::to_string(trace[i].t) + " after " + std::to_string(trace[i - 1].t) + ")");
    }
  }
  Pipeline pipeline(room, cfg.pipeline);
  MetricsTracker metrics(room, cfg.collision_radius);
  RunResult result;
  result.log.reserve(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto out = pipeline.step(trace[i]);
    const auto ev = metrics.observe(out.t, out.chest, out.locomotion.mode);
    result.log.push_back(frame_record(i, out, ev).dump());
  }
  result.metrics = metrics.report();
  return result;
}

inline RunResult run_trace(const SimConfig& cfg, const RoomModel& room, std::span<const SkeletonFrame> trace) {
  return run_trace(cfg, std::make_shared<const RoomModel>(room), trace);
}

/// True iff two runs over the same inputs produce identical frame logs.
inline bool replay_determinism_check(const SimConfig& cfg, const RoomModel& room,
                                     std::span<const SkeletonFrame> trace) {
  return run_trace(cfg, room, trace).log == run_trace(cfg, room, trace).log;
}

/// Rebuilds the metrics report from a frame log.
inline MetricsReport metrics_from_log(std::istream& in) {
  MetricsReport m;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  double t0 = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const double t = j.at("t").get<double>();
      if (first) {
        t0 = t;
        first = false;
      }
      m.task_time = t - t0;
      const auto& ev = j.at("events");
      if (ev.at("exit").get<bool>()) ++m.total_exits;
      m.total_hits += static_cast<int>(ev.at("hits").size());
      const auto mode = locomotion_mode_from_string(j.at("mode").get<std::string>());
      ++m.mode_histogram[static_cast<std::size_t>(mode)];
    } catch (const std::exception& e) {
      throw SimError("log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  m.runs_with_exit = m.total_exits > 0 ? 1 : 0;
  m.runs_with_hit = m.total_hits > 0 ? 1 : 0;
  return m;
}

}  // namespace safewalk
