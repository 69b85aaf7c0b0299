#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scenfuzz/scenario.h"

namespace scenfuzz {

struct EnvState {
  std::vector<double> observation;
  int frame = 0;

  bool operator==(const EnvState&) const = default;
};

using Trajectory = std::vector<EnvState>;

struct EpisodeResult {
  double cumulative_reward = 0.0;
  int frames = 0;
  bool failed = false;
  std::optional<std::string> failure_kind;
  // Initial state through terminal state; frames == trajectory.size() - 1.
  Trajectory trajectory;

  bool operator==(const EpisodeResult&) const = default;
};

struct StepOutcome {
  EnvState state;
  double reward = 0.0;
  // Set when the policy failed during this frame.
  std::optional<std::string> failure_kind;
  // Task finished successfully; the episode ends without failure.
  bool done = false;
};

// A simulated environment bundled with the policy under test. Instances keep
// per-episode state and must not be shared between concurrent rollouts.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string_view name() const = 0;
  virtual const ScenarioSpace& space() const = 0;
  virtual int default_max_frames() const = 0;

  // Per-dimension lower/upper bounds of observation vectors. Used for the
  // corpus freshness grid; values outside are clamped into the edge cells.
  virtual std::vector<double> observation_lower() const = 0;
  virtual std::vector<double> observation_upper() const = 0;

  // Constraints beyond the box bounds. Default: none.
  virtual std::optional<std::string> CheckConstraints(
      std::span<const double> params) const;

  ConstraintHook constraint_hook() const;

  // Places the environment at the scenario's initial conditions.
  virtual EnvState Reset(std::span<const double> params) = 0;
  // True when the task is already satisfied in the current state.
  virtual bool TaskComplete() const { return false; }
  // Advances to `frame` (1-based). `last_frame` is true for frame ==
  // max_frames so end-of-episode failure conditions can be checked.
  virtual StepOutcome Step(int frame, bool last_frame) = 0;
};

// Rolls out the bundled policy from the scenario until failure, task
// completion or max_frames. Throws on an invalid scenario or max_frames <= 0.
EpisodeResult RunEpisode(Environment& env, const Scenario& scenario,
                         int max_frames);
EpisodeResult RunEpisode(Environment& env, std::span<const double> params,
                         int max_frames);

// Numeric tuning knobs passed to environment factories ("collision_radius",
// ...). Unknown keys are rejected by the factory.
using EnvParams = std::map<std::string, double>;
using EnvironmentFactory =
    std::function<std::unique_ptr<Environment>(const EnvParams&)>;

// Name -> factory map. The global instance comes preloaded with
// "collision-avoidance-2d" and "coop-nav".
class EnvironmentRegistry {
 public:
  static EnvironmentRegistry& Global();

  void Register(const std::string& name, EnvironmentFactory factory);
  bool Contains(const std::string& name) const;
  std::unique_ptr<Environment> Create(const std::string& name,
                                      const EnvParams& params = {}) const;
  std::vector<std::string> Names() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, EnvironmentFactory> factories_;
};

}  // namespace scenfuzz
