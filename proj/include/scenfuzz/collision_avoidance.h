#pragma once

#include "scenfuzz/environment.h"

namespace scenfuzz {

// Two-aircraft encounter in the plane. The ownship starts at the origin
// heading +x; the intruder flies a straight line.
//
// Scenario parameters (D = 5):
//   0 intruder_x        [500, 5000] m
//   1 intruder_y        [-3000, 3000] m
//   2 intruder_heading  [-pi, pi] rad
//   3 ownship_speed     [50, 200] m/s
//   4 intruder_speed    [50, 200] m/s
//
// Observation layout (ownship frame):
//   0 range [m], 1 bearing of intruder [rad], 2 intruder heading relative to
//   ownship heading [rad], 3 ownship speed, 4 intruder speed.
//
// Scripted policy: once the intruder is within `detection_range` the ownship
// turns away from the intruder's bearing at `turn_rate_deg` per frame.
// Known flaw: an intruder whose course points at the ownship's current
// position to within +/- `blind_cone_deg` is never reacted to, so head-on
// encounters always end in a collision.
//
// Failure ("collision"): closest approach during a frame below
// `collision_radius`. Per-frame reward: min(range, reward_range_cap) /
// reward_range_cap, so persistent proximity yields low cumulative reward.
class CollisionAvoidanceEnv : public Environment {
 public:
  struct Params {
    double detection_range = 1500.0;
    double turn_rate_deg = 3.0;
    double blind_cone_deg = 10.0;
    double collision_radius = 150.0;
    double reward_range_cap = 2000.0;
    double dt = 1.0;
  };

  static constexpr std::string_view kName = "collision-avoidance-2d";

  CollisionAvoidanceEnv() : CollisionAvoidanceEnv(Params{}) {}
  explicit CollisionAvoidanceEnv(Params params);
  // Accepts the Params field names as keys.
  static std::unique_ptr<Environment> Create(const EnvParams& overrides);

  std::string_view name() const override { return kName; }
  const ScenarioSpace& space() const override { return space_; }
  int default_max_frames() const override { return 100; }
  std::vector<double> observation_lower() const override;
  std::vector<double> observation_upper() const override;

  EnvState Reset(std::span<const double> params) override;
  StepOutcome Step(int frame, bool last_frame) override;

  const Params& params() const { return params_; }
  // Turn (rad) the scripted policy commands in the current state.
  double PolicyTurn() const;

 private:
  EnvState Observe(int frame) const;

  Params params_;
  ScenarioSpace space_;
  double own_x_ = 0, own_y_ = 0, own_heading_ = 0, own_speed_ = 0;
  double int_x_ = 0, int_y_ = 0, int_heading_ = 0, int_speed_ = 0;
};

}  // namespace scenfuzz
