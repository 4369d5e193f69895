#include "safewalk/warning.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace {

using namespace safewalk;
constexpr double kPi = std::numbers::pi;

void expect_rgba(const Rgba& c, double r, double g, double b, double a, double tol = 1e-12) {
  EXPECT_NEAR(c.r, r, tol);
  EXPECT_NEAR(c.g, g, tol);
  EXPECT_NEAR(c.b, b, tol);
  EXPECT_NEAR(c.a, a, tol);
}

// ---- zones and appearance --------------------------------------------------

TEST(Zone, Examples) {
  EXPECT_EQ(classify_zone(0.30), Zone::Danger);
  EXPECT_EQ(classify_zone(1.20), Zone::Normal);
  EXPECT_EQ(classify_zone(10.0), Zone::Normal);
  EXPECT_EQ(classify_zone(-0.5), Zone::Danger);
}

TEST(Zone, BoundariesAreLowerInclusive) {
  const std::pair<double, Zone> edges[] = {
      {0.40, Zone::Warning}, {0.80, Zone::PreWarning}, {1.20, Zone::Normal}};
  Zone below = Zone::Danger;
  for (auto [d, zone] : edges) {
    EXPECT_EQ(classify_zone(d), zone) << d;
    EXPECT_EQ(classify_zone(std::nextafter(d, 0.0)), below) << d;
    EXPECT_EQ(classify_zone(std::nextafter(d, 10.0)), zone) << d;
    below = zone;
  }
  EXPECT_EQ(classify_zone(0.0), Zone::Danger);
}

TEST(Zone, Monotone) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-0.5, 3.0);
  for (int i = 0; i < 20000; ++i) {
    double a = u(rng);
    double b = u(rng);
    if (a > b) std::swap(a, b);
    ASSERT_LE(static_cast<int>(classify_zone(a)), static_cast<int>(classify_zone(b)));
  }
}

TEST(Appearance, Examples) {
  const auto normal = indicator_appearance(1.20);
  EXPECT_FALSE(normal.visible);

  const auto edge = indicator_appearance(1.20 - 1e-9);
  EXPECT_TRUE(edge.visible);
  expect_rgba(edge.rgba, 1, 1, 1, 0, 1e-8);

  // Midpoint of the Warning ramp between yellow/0.5 and red/0.9.
  const auto mid = indicator_appearance(0.60);
  EXPECT_TRUE(mid.visible);
  expect_rgba(mid.rgba, 1.0, (1.0 + 0.0) / 2, 0.0, (0.5 + 0.9) / 2);

  expect_rgba(indicator_appearance(0.10).rgba, 1, 0, 0, 0.9);
}

TEST(Appearance, ContinuousAtInnerBoundaries) {
  auto channels = [](double d) {
    const auto c = indicator_appearance(d).rgba;
    return std::array<double, 4>{c.r, c.g, c.b, c.a};
  };
  for (double d : {0.40, 0.80}) {
    for (std::size_t c = 0; c < 4; ++c) {
      // One-sided limits by linear extrapolation; the ramps are linear.
      const double left = 2 * channels(d - 1e-6)[c] - channels(d - 2e-6)[c];
      const double right = 2 * channels(d + 1e-6)[c] - channels(d + 2e-6)[c];
      EXPECT_NEAR(left, right, 1e-6) << d << " channel " << c;
      // Raw samples differ by at most the steepest ramp slope times the gap.
      EXPECT_LE(std::abs(channels(d - 1e-6)[c] - channels(d + 1e-6)[c]), 2.5 * 2e-6 + 1e-12);
    }
  }
}

TEST(Appearance, AlphaNonIncreasingAndRedWhenVisible) {
  double prev = indicator_appearance(0.0).rgba.a;
  for (int mm = 1; mm <= 2000; ++mm) {
    const auto app = indicator_appearance(mm / 1000.0);
    const double alpha = app.visible ? app.rgba.a : 0.0;
    ASSERT_LE(alpha, prev + 1e-15) << mm;
    if (app.visible) {
      ASSERT_EQ(app.rgba.r, 1.0);
      for (double c : {app.rgba.g, app.rgba.b, app.rgba.a}) {
        ASSERT_GE(c, 0.0);
        ASSERT_LE(c, 1.0);
      }
    }
    ASSERT_EQ(app.visible, classify_zone(mm / 1000.0) != Zone::Normal);
    prev = alpha;
  }
}

// ---- arrows ----------------------------------------------------------------

HazardStatus status(Zone zone, double bearing, bool in_fov, std::string id = "h") {
  HazardStatus s;
  s.id = std::move(id);
  s.zone = zone;
  s.bearing = bearing;
  s.in_fov = in_fov;
  return s;
}

TEST(Arrow, Examples) {
  EXPECT_EQ(offscreen_arrow(status(Zone::Warning, -kPi / 2, false)), Side::Right);
  EXPECT_EQ(offscreen_arrow(status(Zone::Warning, kPi / 2, false)), Side::Left);
  EXPECT_EQ(offscreen_arrow(status(Zone::Danger, 0.0, true)), std::nullopt);
  EXPECT_EQ(offscreen_arrow(status(Zone::Normal, kPi, false)), std::nullopt);
  EXPECT_EQ(offscreen_arrow(status(Zone::Danger, kPi, false)), Side::Right);
}

// ---- sound alert -----------------------------------------------------------

enum class Look { Gazed, InView, OutOfView };

struct Expected {
  bool ringing;
  bool acknowledged;
};

/// Independent restatement of the alert rules for one hazard.
Expected alert_oracle(bool danger, Look look, bool ringing, bool acknowledged) {
  if (!danger) return {false, false};                 // left the Danger zone
  if (look == Look::Gazed) return {false, true};       // looked straight at it
  if (look == Look::OutOfView && !acknowledged) return {true, false};  // unseen danger
  return {ringing, acknowledged};
}

TEST(Alert, ExhaustiveTruthTable) {
  const double gaze = kPi / 12;
  const double fov = kPi / 4;
  int mismatches = 0;
  for (Zone zone : {Zone::Danger, Zone::Warning, Zone::PreWarning, Zone::Normal}) {
    for (Look look : {Look::Gazed, Look::InView, Look::OutOfView}) {
      for (bool ringing : {false, true}) {
        for (bool ack : {false, true}) {
          for (double sign : {-1.0, 1.0}) {
            const double bearing = sign * (look == Look::Gazed ? 0.1 : look == Look::InView ? 0.5 : 2.0);
            const auto s = status(zone, bearing, in_fov(bearing, fov));
            AlertState before;
            if (ringing) before.ringing.insert("h");
            if (ack) before.acknowledged.insert("h");
            const auto after = sound_alert_step(before, {s}, gaze);
            const auto want = alert_oracle(zone == Zone::Danger, look, ringing, ack);
            if (after.ringing.contains("h") != want.ringing ||
                after.acknowledged.contains("h") != want.acknowledged) {
              ++mismatches;
              ADD_FAILURE() << "zone " << to_string(zone) << " look " << static_cast<int>(look)
                            << " ringing " << ringing << " ack " << ack;
            }
          }
        }
      }
    }
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(Alert, Examples) {
  AlertState a;
  a = sound_alert_step(a, {status(Zone::Danger, kPi, false)});
  EXPECT_TRUE(a.ringing.contains("h"));
  auto turned = sound_alert_step(a, {status(Zone::Danger, 0.05, true)});
  EXPECT_TRUE(turned.ringing.empty());
  auto backed = sound_alert_step(a, {status(Zone::Warning, kPi, false)});
  EXPECT_TRUE(backed.ringing.empty());
}

TEST(Alert, AcknowledgedHazardRearmsAfterLeavingDanger) {
  AlertState a;
  a = sound_alert_step(a, {status(Zone::Danger, kPi, false)});
  a = sound_alert_step(a, {status(Zone::Danger, 0.0, true)});
  a = sound_alert_step(a, {status(Zone::Danger, kPi, false)});
  EXPECT_TRUE(a.ringing.empty());
  a = sound_alert_step(a, {status(Zone::Warning, kPi, false)});
  a = sound_alert_step(a, {status(Zone::Danger, kPi, false)});
  EXPECT_TRUE(a.ringing.contains("h"));
}

TEST(Alert, DropsHazardsNoLongerReported) {
  AlertState a;
  a = sound_alert_step(a, {status(Zone::Danger, kPi, false, "x")});
  a = sound_alert_step(a, {status(Zone::Normal, 0.0, true, "y")});
  EXPECT_TRUE(a.ringing.empty());
}

// ---- frames ----------------------------------------------------------------

RoomModel room_with_box(Vec2 min, Vec2 max) {
  auto room = default_room();
  room.obstacles.push_back({"chair", min, max, 0.9, "chair"});
  validate(room);
  return room;
}

TEST(Frame, CentreOfEmptyRoomIsQuiet) {
  AlertState alert;
  const auto f = compose_warning_frame(Pose2D({1.5, 1.5}, 0.3), default_room(), {}, alert, 0.0);
  ASSERT_EQ(f.hazards.size(), 4u);
  for (const auto& h : f.hazards) {
    EXPECT_NEAR(h.distance, 1.5, 1e-12);
    EXPECT_EQ(h.zone, Zone::Normal);
    EXPECT_FALSE(h.appearance.visible);
  }
  EXPECT_TRUE(f.arrows.empty());
  EXPECT_FALSE(f.sound_on);
}

TEST(Frame, FacingNearbyWall) {
  AlertState alert;
  // limit_0 runs along z = 0; yaw pi faces -z.
  const auto f = compose_warning_frame(Pose2D({1.5, 0.3}, kPi), default_room(), {}, alert, 0.0);
  const auto& wall = f.hazards[0];
  EXPECT_EQ(wall.id, "limit_0");
  EXPECT_EQ(wall.zone, Zone::Danger);
  EXPECT_TRUE(wall.appearance.visible);
  EXPECT_TRUE(wall.in_fov);
  EXPECT_TRUE(f.arrows.empty());
  EXPECT_FALSE(f.sound_on);
}

TEST(Frame, ChairDirectlyBehind) {
  const auto room = room_with_box({1.2, 0.7}, {1.8, 1.2});
  AlertState alert;
  const auto f = compose_warning_frame(Pose2D({1.5, 1.5}, 0.0), room, {}, alert, 0.0);
  const auto& chair = f.hazards.back();
  EXPECT_EQ(chair.id, "chair");
  EXPECT_NEAR(chair.distance, 0.3, 1e-12);
  EXPECT_EQ(chair.zone, Zone::Danger);
  EXPECT_FALSE(chair.in_fov);
  ASSERT_EQ(f.arrows.size(), 1u);
  EXPECT_EQ(f.arrows[0].id, "chair");
  EXPECT_TRUE(f.sound_on);
}

TEST(Frame, EmptyRoomGivesEmptyHazards) {
  RoomModel room;
  AlertState alert;
  const auto f = compose_warning_frame(Pose2D({0, 0}, 0), room, {}, alert, 1.0);
  EXPECT_TRUE(f.hazards.empty());
  EXPECT_FALSE(f.sound_on);
}

TEST(Frame, StandingOnObstacleStillHasBearing) {
  const auto room = room_with_box({1.0, 1.0}, {2.0, 2.0});
  AlertState alert;
  const auto f = compose_warning_frame(Pose2D({1.5, 1.2}, 0.0), room, {}, alert, 0.0);
  const auto& chair = f.hazards.back();
  EXPECT_EQ(chair.distance, 0.0);
  EXPECT_NEAR(chair.bearing, 0.0, 1e-12);  // aims at the box centre
}

TEST(Frame, ReplayIsPureAndInvariantsHold) {
  const auto room = room_with_box({0.4, 2.2}, {0.9, 2.7});
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Pose2D> poses;
  Vec2 p{1.5, 1.5};
  double yaw = 0.0;
  for (int i = 0; i < 3000; ++i) {
    p = p + Vec2{0.05 * u(rng), 0.05 * u(rng)};
    p = {std::clamp(p.x, -0.2, 3.2), std::clamp(p.z, -0.2, 3.2)};
    yaw += 0.2 * u(rng);
    poses.emplace_back(p, yaw);
  }
  AlertState a;
  AlertState b;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const auto fa = compose_warning_frame(poses[i], room, {}, a, i / 30.0);
    const auto fb = compose_warning_frame(poses[i], room, {}, b, i / 30.0);
    ASSERT_EQ(to_json(fa).dump(), to_json(fb).dump());
    ASSERT_EQ(fa.sound_on, !a.ringing.empty());
    for (const auto& h : fa.hazards) {
      if (a.ringing.contains(h.id)) {
        ASSERT_EQ(h.zone, Zone::Danger);
      }
      ASSERT_EQ(h.zone, classify_zone(h.distance));
    }
    for (const auto& arrow : fa.arrows) {
      const auto it = std::find_if(fa.hazards.begin(), fa.hazards.end(), [&](auto& h) { return h.id == arrow.id; });
      ASSERT_NE(it, fa.hazards.end());
      ASSERT_FALSE(it->in_fov);
      ASSERT_NE(it->zone, Zone::Normal);
    }
  }
}

TEST(Frame, JsonRoundTrip) {
  const auto room = room_with_box({1.2, 0.7}, {1.8, 1.2});
  AlertState alert;
  const auto f = compose_warning_frame(Pose2D({1.5, 1.5}, 0.0), room, {}, alert, 2.5);
  const auto j = to_json(f);
  EXPECT_EQ(j["hazards"][4]["zone"], "danger");
  EXPECT_EQ(j["arrows"][0]["side"], "right");
  EXPECT_EQ(j["sound_on"], true);
  EXPECT_EQ(to_json(warning_frame_from_json(j)), j);
}

}  // namespace
