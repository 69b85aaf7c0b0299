#include "scenfuzz/environment.h"

#include "scenfuzz/collision_avoidance.h"
#include "scenfuzz/coop_nav.h"
#include "scenfuzz/error.h"

namespace scenfuzz {

std::optional<std::string> Environment::CheckConstraints(
    std::span<const double>) const {
  return std::nullopt;
}

ConstraintHook Environment::constraint_hook() const {
  return [this](std::span<const double> p) { return CheckConstraints(p); };
}

EpisodeResult RunEpisode(Environment& env, std::span<const double> params,
                         int max_frames) {
  if (max_frames <= 0) {
    throw InvalidArgument("run_episode: max_frames must be positive");
  }
  const ValidationResult valid =
      Validate(env.space(), params, env.constraint_hook());
  if (!valid) {
    throw InvalidArgument("run_episode: invalid scenario: " + valid.reason());
  }

  EpisodeResult result;
  result.trajectory.reserve(static_cast<size_t>(max_frames) + 1);
  result.trajectory.push_back(env.Reset(params));
  if (!env.TaskComplete()) {
    for (int frame = 1; frame <= max_frames; ++frame) {
      StepOutcome step = env.Step(frame, frame == max_frames);
      result.cumulative_reward += step.reward;
      result.trajectory.push_back(std::move(step.state));
      if (step.failure_kind) {
        result.failed = true;
        result.failure_kind = std::move(step.failure_kind);
        break;
      }
      if (step.done) break;
    }
  }
  result.frames = static_cast<int>(result.trajectory.size()) - 1;
  return result;
}

EpisodeResult RunEpisode(Environment& env, const Scenario& scenario,
                         int max_frames) {
  return RunEpisode(env, std::span<const double>(scenario.params), max_frames);
}

EnvironmentRegistry& EnvironmentRegistry::Global() {
  static EnvironmentRegistry* registry = [] {
    auto* r = new EnvironmentRegistry();
    r->Register(std::string(CollisionAvoidanceEnv::kName),
                &CollisionAvoidanceEnv::Create);
    r->Register(std::string(CoopNavEnv::kName), &CoopNavEnv::Create);
    return r;
  }();
  return *registry;
}

void EnvironmentRegistry::Register(const std::string& name,
                                   EnvironmentFactory factory) {
  std::lock_guard lock(mu_);
  factories_[name] = std::move(factory);
}

bool EnvironmentRegistry::Contains(const std::string& name) const {
  std::lock_guard lock(mu_);
  return factories_.count(name) > 0;
}

std::unique_ptr<Environment> EnvironmentRegistry::Create(
    const std::string& name, const EnvParams& params) const {
  EnvironmentFactory factory;
  {
    std::lock_guard lock(mu_);
    auto it = factories_.find(name);
    if (it == factories_.end()) {
      throw Error(ErrorCode::kConfig, "unknown environment '" + name + "'");
    }
    factory = it->second;
  }
  return factory(params);
}

std::vector<std::string> EnvironmentRegistry::Names() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> names;
  for (const auto& [name, _] : factories_) names.push_back(name);
  return names;
}

}  // namespace scenfuzz
