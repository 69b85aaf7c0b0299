#include "scenfuzz/coop_nav.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "env_params_internal.h"

namespace scenfuzz {
namespace {

std::vector<std::string> CoopNavDimNames() {
  std::vector<std::string> names;
  for (int i = 0; i < CoopNavEnv::kAgents; ++i) {
    names.push_back("agent" + std::to_string(i) + "_x");
    names.push_back("agent" + std::to_string(i) + "_y");
  }
  for (int i = 0; i < CoopNavEnv::kAgents; ++i) {
    names.push_back("landmark" + std::to_string(i) + "_x");
    names.push_back("landmark" + std::to_string(i) + "_y");
  }
  return names;
}

// Closest approach of two points moving linearly over one frame.
double ClosestApproach(double rx, double ry, double wx, double wy) {
  const double ww = wx * wx + wy * wy;
  double t = 0.0;
  if (ww > 0.0) t = std::clamp(-(rx * wx + ry * wy) / ww, 0.0, 1.0);
  return std::hypot(rx + wx * t, ry + wy * t);
}

}  // namespace

CoopNavEnv::CoopNavEnv(Params params)
    : params_(params),
      space_(std::vector<double>(2 * 2 * kAgents, -1.0),
             std::vector<double>(2 * 2 * kAgents, 1.0), CoopNavDimNames()) {}

std::unique_ptr<Environment> CoopNavEnv::Create(const EnvParams& overrides) {
  Params p;
  internal::ApplyEnvParams(kName, overrides,
                           {{"max_speed", &p.max_speed},
                            {"repulsion_radius", &p.repulsion_radius},
                            {"repulsion_gain", &p.repulsion_gain},
                            {"collision_distance", &p.collision_distance},
                            {"cover_radius", &p.cover_radius}});
  return std::make_unique<CoopNavEnv>(p);
}

std::vector<double> CoopNavEnv::observation_lower() const {
  return std::vector<double>(2 * 2 * kAgents, -1.0);
}

std::vector<double> CoopNavEnv::observation_upper() const {
  return std::vector<double>(2 * 2 * kAgents, 1.0);
}

std::optional<std::string> CoopNavEnv::CheckConstraints(
    std::span<const double> p) const {
  for (int i = 0; i < kAgents; ++i) {
    for (int j = i + 1; j < kAgents; ++j) {
      const double gap =
          std::hypot(p[2 * i] - p[2 * j], p[2 * i + 1] - p[2 * j + 1]);
      if (gap < params_.collision_distance) {
        return "agents " + std::to_string(i) + " and " + std::to_string(j) +
               " start overlapping";
      }
    }
  }
  return std::nullopt;
}

EnvState CoopNavEnv::Reset(std::span<const double> p) {
  for (int i = 0; i < kAgents; ++i) {
    agents_[i] = {p[2 * i], p[2 * i + 1]};
    landmarks_[i] = {p[2 * kAgents + 2 * i], p[2 * kAgents + 2 * i + 1]};
  }
  return Observe(0);
}

std::array<int, CoopNavEnv::kAgents> CoopNavEnv::Assignment() const {
  std::array<int, kAgents> assignment{};
  std::array<bool, kAgents> claimed{};
  for (int i = 0; i < kAgents; ++i) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int l = 0; l < kAgents; ++l) {
      if (claimed[l]) continue;
      const double d = std::hypot(agents_[i].x - landmarks_[l].x,
                                  agents_[i].y - landmarks_[l].y);
      if (d < best_d) {
        best_d = d;
        best = l;
      }
    }
    claimed[best] = true;
    assignment[i] = best;
  }
  return assignment;
}

bool CoopNavEnv::TaskComplete() const {
  for (const Vec2& l : landmarks_) {
    bool covered = false;
    for (const Vec2& a : agents_) {
      if (std::hypot(a.x - l.x, a.y - l.y) <= params_.cover_radius) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

StepOutcome CoopNavEnv::Step(int frame, bool last_frame) {
  const std::array<int, kAgents> assignment = Assignment();
  std::array<Vec2, kAgents> velocity{};
  for (int i = 0; i < kAgents; ++i) {
    const Vec2& target = landmarks_[assignment[i]];
    double vx = target.x - agents_[i].x;
    double vy = target.y - agents_[i].y;
    const double dist = std::hypot(vx, vy);
    if (dist > params_.max_speed) {
      vx *= params_.max_speed / dist;
      vy *= params_.max_speed / dist;
    }
    for (int j = 0; j < kAgents; ++j) {
      if (j == i) continue;
      const double gx = agents_[i].x - agents_[j].x;
      const double gy = agents_[i].y - agents_[j].y;
      const double gap = std::hypot(gx, gy);
      if (gap > 0.0 && gap < params_.repulsion_radius) {
        vx += params_.repulsion_gain * gx / gap;
        vy += params_.repulsion_gain * gy / gap;
      }
    }
    const double speed = std::hypot(vx, vy);
    if (speed > params_.max_speed) {
      vx *= params_.max_speed / speed;
      vy *= params_.max_speed / speed;
    }
    velocity[i] = {vx, vy};
  }

  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kAgents; ++i) {
    for (int j = i + 1; j < kAgents; ++j) {
      min_gap = std::min(
          min_gap, ClosestApproach(agents_[j].x - agents_[i].x,
                                   agents_[j].y - agents_[i].y,
                                   velocity[j].x - velocity[i].x,
                                   velocity[j].y - velocity[i].y));
    }
  }

  for (int i = 0; i < kAgents; ++i) {
    agents_[i].x += velocity[i].x;
    agents_[i].y += velocity[i].y;
  }

  StepOutcome out;
  out.state = Observe(frame);
  for (const Vec2& a : agents_) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const Vec2& l : landmarks_) {
      nearest = std::min(nearest, std::hypot(a.x - l.x, a.y - l.y));
    }
    out.reward -= nearest;
  }
  if (min_gap < params_.collision_distance) {
    out.failure_kind = "collision";
    return out;
  }
  out.done = TaskComplete();
  if (last_frame && !out.done) out.failure_kind = "uncovered_landmark";
  return out;
}

EnvState CoopNavEnv::Observe(int frame) const {
  EnvState s;
  s.frame = frame;
  s.observation.reserve(4 * kAgents);
  for (const Vec2& a : agents_) {
    s.observation.push_back(a.x);
    s.observation.push_back(a.y);
  }
  for (const Vec2& l : landmarks_) {
    s.observation.push_back(l.x);
    s.observation.push_back(l.y);
  }
  return s;
}

}  // namespace scenfuzz
