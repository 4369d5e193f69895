#include "safewalk/locomotion.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace safewalk;
using Mode = LocomotionMode;
constexpr double kDt = 1.0 / 30;

LocomotionState run(LocomotionState s, double speed, bool stepping, int ticks, const LocomotionConfig& cfg = {}) {
  for (int i = 0; i < ticks; ++i) s = cwip_transition(s, speed, stepping, kDt, cfg);
  return s;
}

TEST(Cwip, SustainedSpeedEntersWalking) {
  LocomotionState s;
  s = run(s, 1.0, false, 2);
  EXPECT_NE(s.mode, Mode::NaturalWalking);
  s = run(s, 1.0, false, 1);
  EXPECT_EQ(s.mode, Mode::NaturalWalking);
}

TEST(Cwip, SlowSteppingIsWalkingInPlace) {
  EXPECT_EQ(run({}, 0.1, true, 1).mode, Mode::WalkingInPlace);
}

TEST(Cwip, RestAfterDwellLeavesWalking) {
  LocomotionState s{Mode::NaturalWalking, 0, 0.0};
  s = run(s, 0.0, false, 8);
  EXPECT_EQ(s.mode, Mode::NaturalWalking);
  s = run(s, 0.0, false, 1);  // 9 ticks = 0.3 s
  EXPECT_EQ(s.mode, Mode::Stationary);
}

TEST(Cwip, SpeedInsideMarginKeepsWalking) {
  LocomotionState s{Mode::NaturalWalking, 0, 0.0};
  s = run(s, 0.75, false, 100);
  EXPECT_EQ(s.mode, Mode::NaturalWalking);
}

TEST(Cwip, DipResetsDwellTimer) {
  LocomotionState s{Mode::NaturalWalking, 0, 0.0};
  s = run(s, 0.0, false, 8);
  s = run(s, 1.0, false, 1);
  s = run(s, 0.0, false, 8);
  EXPECT_EQ(s.mode, Mode::NaturalWalking);
}

TEST(Cwip, RejectsNonPositiveDt) {
  EXPECT_THROW(cwip_transition({}, 0.0, false, 0.0, {}), std::invalid_argument);
}

TEST(Cwip, ZeroInputStaysStationary) {
  LocomotionState s;
  for (int i = 0; i < 1000; ++i) {
    s = cwip_transition(s, 0.0, false, kDt, {});
    ASSERT_EQ(s.mode, Mode::Stationary);
  }
}

TEST(Cwip, SingleSpikeNeverEntersWalking) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    LocomotionConfig cfg;
    cfg.enter_frames = 2 + static_cast<int>(u(rng) * 4);
    LocomotionState s;
    // Isolated spikes separated by at least one slow tick.
    for (int i = 0; i < 60; ++i) {
      const bool spike = i % 2 == 0 && u(rng) < 0.5;
      s = cwip_transition(s, spike ? 0.8 + 3 * u(rng) : 0.8 * u(rng), u(rng) < 0.5, kDt, cfg);
      ASSERT_NE(s.mode, Mode::NaturalWalking);
    }
  }
}

TEST(Cwip, DeterministicOverRandomHistories) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<double, bool>> inputs;
    for (int i = 0; i < 300; ++i) inputs.emplace_back(2 * u(rng), u(rng) < 0.5);
    LocomotionState a;
    LocomotionState b;
    for (auto [v, step] : inputs) {
      a = cwip_transition(a, v, step, kDt, {});
      b = cwip_transition(b, v, step, kDt, {});
      ASSERT_EQ(a, b);
      ASSERT_GE(a.frames_above_threshold, 0);
      ASSERT_GE(a.time_below_exit_threshold, 0.0);
    }
  }
}

TEST(WipSpeed, Examples) {
  const LocomotionConfig cfg;
  EXPECT_EQ(wip_virtual_speed(0.0, 0.25, cfg), 0.0);
  EXPECT_DOUBLE_EQ(wip_virtual_speed(2.0, 0.25, cfg), 0.5 * 2.0 * (0.25 / 0.25));
  EXPECT_DOUBLE_EQ(wip_virtual_speed(10.0, 0.5, cfg), 2.0);
}

TEST(Avatar, NaturalWalkingCopiesDisplacement) {
  const auto p = integrate_avatar({}, Mode::NaturalWalking, {0.1, 0.2}, 0.4, 0.0, 0.1);
  EXPECT_DOUBLE_EQ(p.position.x, 0.1);
  EXPECT_DOUBLE_EQ(p.position.z, 0.2);
  EXPECT_DOUBLE_EQ(p.yaw, 0.4);
}

TEST(Avatar, WalkingInPlaceAdvancesAlongGaze) {
  const auto p = integrate_avatar({}, Mode::WalkingInPlace, {0, 0}, 0.0, 1.0, 0.1);
  EXPECT_NEAR(p.position.x, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(p.position.z, 0.1);
}

TEST(Avatar, StationaryWithoutMotionIsIdentity) {
  const AvatarPose start{{1, 1.3, 2}, 0.5};
  const auto p = integrate_avatar(start, Mode::Stationary, {0, 0}, 0.5, 0.0, kDt);
  EXPECT_EQ(p.position.x, start.position.x);
  EXPECT_EQ(p.position.y, start.position.y);
  EXPECT_EQ(p.position.z, start.position.z);
  EXPECT_EQ(p.yaw, start.yaw);
}

TEST(Avatar, DisplacementBound) {
  // Per tick the avatar moves at most the real step plus the capped WIP
  // contribution; WIP drift is mapped too, so the bound is their sum.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const LocomotionConfig cfg;
  for (int i = 0; i < 20000; ++i) {
    const Mode mode = static_cast<Mode>(static_cast<int>((u(rng) + 1) * 1.5) % 3);
    const Vec2 real{0.1 * u(rng), 0.1 * u(rng)};
    const double v = wip_virtual_speed(5 * (u(rng) + 1), 0.5 * (u(rng) + 1), cfg);
    const double dt = 0.001 + 0.1 * (u(rng) + 1);
    const AvatarPose start{{u(rng), 1.3, u(rng)}, 3 * u(rng)};
    const auto end = integrate_avatar(start, mode, real, 3 * u(rng), v, dt);
    const double moved = (ground(end.position) - ground(start.position)).norm();
    const double bound = mode == Mode::WalkingInPlace ? real.norm() + cfg.wip_max_speed * dt : real.norm();
    ASSERT_LE(moved, bound + 1e-12);
    if (mode != Mode::WalkingInPlace) {
      ASSERT_NEAR(moved, real.norm(), 1e-12);
    }
  }
}

TEST(Mode, StringRoundTrip) {
  for (auto m : {Mode::Stationary, Mode::NaturalWalking, Mode::WalkingInPlace}) {
    EXPECT_EQ(locomotion_mode_from_string(to_string(m)), m);
  }
  EXPECT_THROW(locomotion_mode_from_string("running"), std::invalid_argument);
}

}  // namespace
