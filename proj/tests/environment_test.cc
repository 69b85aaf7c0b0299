#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "scenfuzz/collision_avoidance.h"
#include "scenfuzz/coop_nav.h"
#include "scenfuzz/environment.h"
#include "scenfuzz/error.h"
#include "scenfuzz/rng.h"

namespace scenfuzz {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(CollisionAvoidanceTest, HeadOnEncounterCollides) {
  CollisionAvoidanceEnv env;
  // Closing at 200 m/s from 3000 m: separation drops below 150 m at
  // t = 14.25 s, inside frame 15.
  const EpisodeResult r =
      RunEpisode(env, std::vector<double>{3000, 0, kPi, 100, 100}, 100);
  EXPECT_TRUE(r.failed);
  EXPECT_EQ(r.failure_kind, "collision");
  EXPECT_EQ(r.frames, 15);
  EXPECT_EQ(r.trajectory.size(), 16u);
}

TEST(CollisionAvoidanceTest, DivergingIntruderIsSafe) {
  CollisionAvoidanceEnv env;
  const EpisodeResult r =
      RunEpisode(env, std::vector<double>{4000, 0, 0, 50, 200}, 100);
  EXPECT_FALSE(r.failed);
  EXPECT_EQ(r.frames, 100);
  // Range stays above the 2000 m reward cap the whole time.
  EXPECT_DOUBLE_EQ(r.cumulative_reward, 100.0);
}

TEST(CollisionAvoidanceTest, PolicyTurnsAwayFromBearing) {
  CollisionAvoidanceEnv env;
  // Intruder ahead-left, flying south (not at the ownship).
  env.Reset(std::vector<double>{1000, 500, -kPi / 2, 100, 100});
  EXPECT_DOUBLE_EQ(env.PolicyTurn(), -3.0 * kPi / 180.0);
  env.Reset(std::vector<double>{1000, -500, kPi / 2, 100, 100});
  EXPECT_DOUBLE_EQ(env.PolicyTurn(), 3.0 * kPi / 180.0);
}

TEST(CollisionAvoidanceTest, NoTurnOutsideDetectionRange) {
  CollisionAvoidanceEnv env;
  env.Reset(std::vector<double>{2000, 500, -kPi / 2, 100, 100});
  EXPECT_EQ(env.PolicyTurn(), 0.0);
}

TEST(CollisionAvoidanceTest, NoTurnForIntruderAimedAtOwnship) {
  CollisionAvoidanceEnv env;
  // Course toward the origin from (1000, 500), offset by 5 degrees.
  const double course = std::atan2(-500.0, -1000.0) + 5.0 * kPi / 180.0;
  env.Reset(std::vector<double>{1000, 500, course, 100, 100});
  EXPECT_EQ(env.PolicyTurn(), 0.0);
}

TEST(CollisionAvoidanceTest, FastPassCannotTunnel) {
  CollisionAvoidanceEnv::Params p;
  p.dt = 10.0;
  CollisionAvoidanceEnv env(p);
  // 400 m/s closing over 10 s frames: positions jump past each other but the
  // closest approach within the frame is zero.
  const EpisodeResult r =
      RunEpisode(env, std::vector<double>{3000, 0, kPi, 200, 200}, 100);
  EXPECT_TRUE(r.failed);
}

TEST(CollisionAvoidanceTest, ObservationLayout) {
  CollisionAvoidanceEnv env;
  const EnvState s = env.Reset(std::vector<double>{3000, 4000, 0.5, 60, 70});
  ASSERT_EQ(s.observation.size(), 5u);
  EXPECT_DOUBLE_EQ(s.observation[0], 5000.0);
  EXPECT_DOUBLE_EQ(s.observation[1], std::atan2(4000.0, 3000.0));
  EXPECT_DOUBLE_EQ(s.observation[2], 0.5);
  EXPECT_EQ(s.observation[3], 60.0);
  EXPECT_EQ(s.observation[4], 70.0);
  EXPECT_EQ(s.frame, 0);
}

TEST(CoopNavTest, RejectsOverlappingAgents) {
  CoopNavEnv env;
  std::vector<double> p{0, 0, 0.1, 0, 0.8, 0.8, -0.8, -0.8, 0.8, -0.8, -0.8, 0.8};
  EXPECT_TRUE(env.CheckConstraints(p).has_value());
  EXPECT_THROW(RunEpisode(env, p, 25), Error);
  p[2] = 0.5;
  EXPECT_FALSE(env.CheckConstraints(p).has_value());
}

TEST(CoopNavTest, AlreadyCoveredEndsImmediately) {
  CoopNavEnv env;
  const std::vector<double> p{-0.5, 0, 0, 0.5, 0.5, 0,
                              -0.5, 0, 0, 0.5, 0.5, 0};
  const EpisodeResult r = RunEpisode(env, p, 25);
  EXPECT_FALSE(r.failed);
  EXPECT_EQ(r.frames, 0);
  EXPECT_EQ(r.trajectory.size(), 1u);
}

TEST(CoopNavTest, ReachesNearbyLandmarks) {
  CoopNavEnv env;
  const std::vector<double> p{-0.5, 0, 0, 0.5, 0.5, 0,
                              -0.5, 0.3, 0.3, 0.5, 0.5, -0.3};
  const EpisodeResult r = RunEpisode(env, p, 25);
  EXPECT_FALSE(r.failed);
  EXPECT_LT(r.frames, 25);
  EXPECT_LT(r.cumulative_reward, 0.0);
}

TEST(CoopNavTest, UncoveredLandmarkAtLastFrame) {
  CoopNavEnv env;
  // Landmarks 1.6 away cannot be reached in two frames at speed 0.2.
  const std::vector<double> p{-0.8, -0.8, 0, -0.8, 0.8, -0.8,
                              -0.8, 0.8, 0, 0.8, 0.8, 0.8};
  const EpisodeResult r = RunEpisode(env, p, 2);
  EXPECT_TRUE(r.failed);
  EXPECT_EQ(r.failure_kind, "uncovered_landmark");
  EXPECT_EQ(r.frames, 2);
}

TEST(CoopNavTest, GreedyAssignmentInIndexOrder) {
  CoopNavEnv env;
  // Agents 0 and 1 both prefer landmark 0; agent 0 claims it first, agent 1
  // then takes the nearer of the rest and agent 2 gets what is left.
  env.Reset(std::vector<double>{0, 0, 0.1, 0.3, 0.9, 0.9,
                                0.05, 0.1, -0.9, -0.9, 0.95, 0.95});
  const auto a = env.Assignment();
  EXPECT_EQ(a[0], 0);
  EXPECT_EQ(a[1], 2);
  EXPECT_EQ(a[2], 1);
}

TEST(CoopNavTest, CrossingAgentsCollide) {
  CoopNavEnv env;
  // Produced by the coop-nav heuristic edit: two agents get targets that
  // send them into each other.
  const std::vector<double> p{0.08, -0.39, 0.47, -0.49, -0.11, 0.27,
                              -0.6, -0.22, -0.9, -0.9, 0.62, -0.53};
  const EpisodeResult r = RunEpisode(env, p, 25);
  EXPECT_TRUE(r.failed);
  EXPECT_EQ(r.failure_kind, "collision");
  EXPECT_EQ(r.frames, 1);
}

TEST(EnvironmentTest, RunEpisodeIsDeterministic) {
  Rng rng(8);
  for (const std::string name : {"collision-avoidance-2d", "coop-nav"}) {
    auto env = EnvironmentRegistry::Global().Create(name);
    const ScenarioSpace& space = env->space();
    for (int i = 0; i < 20; ++i) {
      std::vector<double> p(space.dims());
      do {
        for (size_t d = 0; d < p.size(); ++d) {
          p[d] = rng.Uniform(space.lower()[d], space.upper()[d]);
        }
      } while (!Validate(space, p, env->constraint_hook()));
      const EpisodeResult a = RunEpisode(*env, p, env->default_max_frames());
      const EpisodeResult b = RunEpisode(*env, p, env->default_max_frames());
      EXPECT_EQ(a, b);
      EXPECT_EQ(a.trajectory.size(), static_cast<size_t>(a.frames) + 1);
      EXPECT_LE(a.frames, env->default_max_frames());
      EXPECT_EQ(a.failed, a.failure_kind.has_value());
    }
  }
}

TEST(EnvironmentTest, RunEpisodeRejectsBadInput) {
  CollisionAvoidanceEnv env;
  EXPECT_THROW(RunEpisode(env, std::vector<double>{3000, 0, 0, 100, 100}, 0),
               Error);
  EXPECT_THROW(RunEpisode(env, std::vector<double>{100, 0, 0, 100, 100}, 10),
               Error);
}

TEST(EnvironmentRegistryTest, KnowsBuiltins) {
  auto& reg = EnvironmentRegistry::Global();
  EXPECT_TRUE(reg.Contains("collision-avoidance-2d"));
  EXPECT_TRUE(reg.Contains("coop-nav"));
  EXPECT_EQ(reg.Create("coop-nav")->space().dims(), 12u);
  EXPECT_EQ(reg.Create("collision-avoidance-2d")->default_max_frames(), 100);
  EXPECT_EQ(reg.Create("coop-nav")->default_max_frames(), 25);
}

TEST(EnvironmentRegistryTest, UnknownNamesAndParamsAreConfigErrors) {
  auto& reg = EnvironmentRegistry::Global();
  try {
    reg.Create("carla");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  try {
    reg.Create("coop-nav", {{"speed_of_light", 1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  auto env = reg.Create("collision-avoidance-2d", {{"collision_radius", 300.0}});
  EXPECT_EQ(static_cast<CollisionAvoidanceEnv&>(*env).params().collision_radius,
            300.0);
}

}  // namespace
}  // namespace scenfuzz
