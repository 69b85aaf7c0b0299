#pragma once

#include <array>

#include "scenfuzz/environment.h"

namespace scenfuzz {

// Cooperative navigation: three agents must cover three landmarks without
// bumping into each other.
//
// Scenario parameters (D = 12), all in [-1, 1]:
//   agent{0,1,2}_{x,y} followed by landmark{0,1,2}_{x,y}.
// The observation uses the same layout with current agent positions.
//
// Scripted policy: every frame, agents in index order greedily claim the
// nearest unclaimed landmark and move toward it at up to `max_speed`. Agents
// closer than `repulsion_radius` add a fixed-gain push away from each other,
// which is too weak to stop agents on crossing paths.
//
// Failures: "collision" when any two agents are closer than
// `collision_distance`; "uncovered_landmark" when some landmark is farther
// than `cover_radius` from every agent at the last frame. The episode ends
// early once every landmark is covered. Per-frame reward:
// -sum_i distance(agent_i, nearest landmark).
class CoopNavEnv : public Environment {
 public:
  struct Params {
    double max_speed = 0.2;
    double repulsion_radius = 0.25;
    double repulsion_gain = 0.05;
    double collision_distance = 0.2;
    double cover_radius = 0.1;
  };

  static constexpr std::string_view kName = "coop-nav";
  static constexpr int kAgents = 3;

  CoopNavEnv() : CoopNavEnv(Params{}) {}
  explicit CoopNavEnv(Params params);
  static std::unique_ptr<Environment> Create(const EnvParams& overrides);

  std::string_view name() const override { return kName; }
  const ScenarioSpace& space() const override { return space_; }
  int default_max_frames() const override { return 25; }
  std::vector<double> observation_lower() const override;
  std::vector<double> observation_upper() const override;

  // Agents may not start overlapping (closer than collision_distance).
  std::optional<std::string> CheckConstraints(
      std::span<const double> params) const override;

  EnvState Reset(std::span<const double> params) override;
  bool TaskComplete() const override;
  StepOutcome Step(int frame, bool last_frame) override;

  const Params& params() const { return params_; }
  // Landmark index claimed by each agent under greedy index-order assignment.
  std::array<int, kAgents> Assignment() const;

 private:
  struct Vec2 {
    double x = 0, y = 0;
  };

  EnvState Observe(int frame) const;

  Params params_;
  ScenarioSpace space_;
  std::array<Vec2, kAgents> agents_{};
  std::array<Vec2, kAgents> landmarks_{};
};

}  // namespace scenfuzz
