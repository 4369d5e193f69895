// Live sessions: a steered synthetic person whose frames run through the
// same pipeline as recorded traces, plus the JSON message protocol.
//
// Client -> server:
//   {"type":"hello", "room": {...room file object...}?, "seed": n?}
//   {"type":"input", "t_client": s, "move": {"forward": f, "strafe": s},
//    "turn": r, "march": bool}
// Server -> client:
//   {"type":"welcome", "session": id, "tick_rate": hz, "room": {...}}
//   {"type":"frame", "session": id, "real": {...}, "metrics": {...},
//    ...frame-log record fields...}
//   {"type":"error", "message": "..."}

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "safewalk/gait.hpp"
#include "safewalk/pipeline.hpp"
#include "safewalk/room.hpp"
#include "safewalk/sim.hpp"

namespace safewalk {

class SessionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ServiceConfig {
  SimConfig sim;
  double max_ground_speed = 1.4;                // m/s at full forward intent
  double max_march_rate = 3.0;                  // steps/s while marching
  double max_turn_rate = std::numbers::pi / 2;  // rad/s at full turn intent
  double walk_step_rate = 1.8;                  // steps/s at full ground speed
  double walk_knee_lift = 0.08;                 // m
  double march_knee_lift = 0.20;                // m
  double noise_sigma = 0.02;                    // m
  std::uint64_t seed = 1;
  BodyParams body;

  void validate() const {
    sim.validate();
    if (!(max_ground_speed > 0.0) || !(max_march_rate > 0.0) || !(max_turn_rate > 0.0)) {
      throw std::invalid_argument("service speed limits must be positive");
    }
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
  }
};

struct InputCommand {
  double t_client = 0.0;
  double forward = 0.0;  // [-1, 1]
  double strafe = 0.0;   // [-1, 1], positive to the left
  double turn = 0.0;     // [-1, 1], positive counter-clockwise
  bool march = false;

  InputCommand clamped() const {
    auto c = [](double v) { return std::isfinite(v) ? std::clamp(v, -1.0, 1.0) : 0.0; };
    return {t_client, c(forward), c(strafe), c(turn), march};
  }

  friend bool operator==(const InputCommand&, const InputCommand&) = default;
};

inline InputCommand input_from_json(const nlohmann::json& j) {
  InputCommand cmd;
  cmd.t_client = j.value("t_client", 0.0);
  if (j.contains("move")) {
    const auto& m = j.at("move");
    cmd.forward = m.value("forward", 0.0);
    cmd.strafe = m.value("strafe", 0.0);
  }
  cmd.turn = j.value("turn", 0.0);
  cmd.march = j.value("march", false);
  return cmd.clamped();
}

inline nlohmann::json to_json(const InputCommand& c) {
  return {{"type", "input"},
          {"t_client", c.t_client},
          {"move", {{"forward", c.forward}, {"strafe", c.strafe}}},
          {"turn", c.turn},
          {"march", c.march}};
}

/// One simulated person in one room. Not thread-safe: a session is driven
/// by a single owner.
class Session {
 public:
  Session(std::string id, std::shared_ptr<const RoomModel> room, ServiceConfig cfg)
      : id_(std::move(id)),
        room_(std::move(room)),
        cfg_(cfg),
        synth_(room_->centroid(), 0.0, cfg.noise_sigma, cfg.seed, cfg.body),
        pipeline_(room_, cfg.sim.pipeline),
        metrics_(room_, cfg.sim.collision_radius) {
    cfg_.validate();
  }

  const std::string& id() const { return id_; }
  const RoomModel& room() const { return *room_; }
  std::uint64_t ticks() const { return tick_; }
  Pose2D real_pose() const { return {synth_.position(), yaw_}; }
  const InputCommand& command() const { return command_; }

  /// Last writer wins; the command is sampled on the next tick.
  void apply_input(const InputCommand& cmd) { command_ = cmd.clamped(); }

  /// Synthesizes one frame from the held command and runs the pipeline.
  /// Motion is never blocked by walls or obstacles; it only raises warnings.
  nlohmann::json tick(double dt) {
    if (!(dt > 0.0)) throw SessionError("tick dt must be positive");
    yaw_ = normalize_angle(yaw_ + command_.turn * cfg_.max_turn_rate * dt);

    const Vec2 fwd = heading(yaw_);
    const Vec2 left{fwd.z, -fwd.x};
    Vec2 vel = fwd * command_.forward + left * command_.strafe;
    if (vel.norm() > 1.0) vel = vel * (1.0 / vel.norm());
    const double effort = vel.norm();

    MotionIntent intent;
    intent.yaw = yaw_;
    intent.velocity = vel * cfg_.max_ground_speed;
    if (effort > 0.0) {
      intent.step_rate = cfg_.walk_step_rate * effort;
      intent.knee_lift = cfg_.walk_knee_lift;
    } else if (command_.march) {
      intent.step_rate = cfg_.max_march_rate;
      intent.knee_lift = cfg_.march_knee_lift;
    }

    const SkeletonFrame frame = synth_.emit(intent, dt);
    const auto out = pipeline_.step(frame);
    const auto ev = metrics_.observe(out.t, out.chest, out.locomotion.mode);

    auto msg = frame_record(tick_, out, ev);
    msg["type"] = "frame";
    msg["session"] = id_;
    msg["real"] = {{"x", frame.chest.x}, {"z", frame.chest.z}, {"yaw", frame.head_yaw}};
    msg["metrics"] = to_json(metrics_.report());
    ++tick_;
    return msg;
  }

 private:
  std::string id_;
  std::shared_ptr<const RoomModel> room_;
  ServiceConfig cfg_;
  GaitSynthesizer synth_;
  Pipeline pipeline_;
  MetricsTracker metrics_;
  InputCommand command_;
  double yaw_ = 0.0;
  std::uint64_t tick_ = 0;
};

/// Owns sessions by id. Registry calls are serialized; each session is
/// still expected to have a single driver.
class SessionRegistry {
 public:
  explicit SessionRegistry(ServiceConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

  std::string create_session(const RoomModel& room) { return create_session(room, cfg_); }

  std::string create_session(const RoomModel& room, const ServiceConfig& cfg) {
    validate(room);
    std::lock_guard lock(mu_);
    std::string id = "s" + std::to_string(++next_id_);
    sessions_.emplace(id, std::make_unique<Session>(id, std::make_shared<const RoomModel>(room), cfg));
    return id;
  }

  void apply_input(const std::string& id, const InputCommand& cmd) { get(id).apply_input(cmd); }
  nlohmann::json tick(const std::string& id, double dt) { return get(id).tick(dt); }

  bool erase(const std::string& id) {
    std::lock_guard lock(mu_);
    return sessions_.erase(id) > 0;
  }

  Session& get(const std::string& id) {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw SessionError("unknown session id " + id);
    return *it->second;
  }

  const ServiceConfig& config() const { return cfg_; }

 private:
  ServiceConfig cfg_;
  std::mutex mu_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 0;
};

/// Protocol state for one client connection. The connection owns at most one
/// session; frames are produced only by tick().
class ProtocolEndpoint {
 public:
  ProtocolEndpoint(SessionRegistry& registry, RoomModel default_room)
      : registry_(registry), default_room_(std::move(default_room)) {}

  ~ProtocolEndpoint() {
    if (session_) registry_.erase(*session_);
  }

  ProtocolEndpoint(const ProtocolEndpoint&) = delete;
  ProtocolEndpoint& operator=(const ProtocolEndpoint&) = delete;

  /// Handles one client message and returns replies to send immediately.
  std::vector<nlohmann::json> handle(const std::string& text) {
    nlohmann::json msg;
    try {
      msg = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      return {error("malformed JSON: " + std::string(e.what()))};
    }
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
      return {error("message needs a string \"type\"")};
    }
    const auto type = msg["type"].get<std::string>();
    try {
      if (type == "hello") return {hello(msg)};
      if (type == "input") {
        if (!session_) return {error("send hello before input")};
        registry_.apply_input(*session_, input_from_json(msg));
        return {};
      }
    } catch (const std::exception& e) {
      return {error(e.what())};
    }
    return {error("unknown message type " + type)};
  }

  std::optional<nlohmann::json> tick(double dt) {
    if (!session_) return std::nullopt;
    return registry_.tick(*session_, dt);
  }

  const std::optional<std::string>& session() const { return session_; }

 private:
  nlohmann::json hello(const nlohmann::json& msg) {
    RoomModel room = msg.contains("room") ? room_from_json(msg["room"]) : default_room_;
    ServiceConfig cfg = registry_.config();
    if (msg.contains("seed")) cfg.seed = msg["seed"].get<std::uint64_t>();
    if (session_) registry_.erase(*session_);
    session_ = registry_.create_session(room, cfg);
    return {{"type", "welcome"},
            {"session", *session_},
            {"tick_rate", 1.0 / cfg.sim.tick},
            {"room", room_to_json(room)}};
  }

  static nlohmann::json error(const std::string& message) {
    return {{"type", "error"}, {"message", message}};
  }

  SessionRegistry& registry_;
  RoomModel default_room_;
  std::optional<std::string> session_;
};

}  // namespace safewalk
