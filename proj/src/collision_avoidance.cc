#include "scenfuzz/collision_avoidance.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "env_params_internal.h"

namespace scenfuzz {
namespace {

constexpr double kPi = std::numbers::pi;

double WrapAngle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0) a += 2.0 * kPi;
  return a - kPi;
}

double DegToRad(double deg) { return deg * kPi / 180.0; }

}  // namespace

CollisionAvoidanceEnv::CollisionAvoidanceEnv(Params params)
    : params_(params),
      space_({500.0, -3000.0, -kPi, 50.0, 50.0},
             {5000.0, 3000.0, kPi, 200.0, 200.0},
             {"intruder_x", "intruder_y", "intruder_heading", "ownship_speed",
              "intruder_speed"}) {}

std::unique_ptr<Environment> CollisionAvoidanceEnv::Create(
    const EnvParams& overrides) {
  Params p;
  internal::ApplyEnvParams(kName, overrides,
                           {{"detection_range", &p.detection_range},
                            {"turn_rate_deg", &p.turn_rate_deg},
                            {"blind_cone_deg", &p.blind_cone_deg},
                            {"collision_radius", &p.collision_radius},
                            {"reward_range_cap", &p.reward_range_cap},
                            {"dt", &p.dt}});
  return std::make_unique<CollisionAvoidanceEnv>(p);
}

std::vector<double> CollisionAvoidanceEnv::observation_lower() const {
  return {0.0, -kPi, -kPi, 50.0, 50.0};
}

std::vector<double> CollisionAvoidanceEnv::observation_upper() const {
  // Farthest initial range is |(5000, 3000)| ~ 5831 m; the pair can drift
  // further apart but those states all land in the edge cell.
  return {6000.0, kPi, kPi, 200.0, 200.0};
}

EnvState CollisionAvoidanceEnv::Reset(std::span<const double> params) {
  own_x_ = 0.0;
  own_y_ = 0.0;
  own_heading_ = 0.0;
  own_speed_ = params[3];
  int_x_ = params[0];
  int_y_ = params[1];
  int_heading_ = params[2];
  int_speed_ = params[4];
  return Observe(0);
}

double CollisionAvoidanceEnv::PolicyTurn() const {
  const double dx = int_x_ - own_x_;
  const double dy = int_y_ - own_y_;
  if (std::hypot(dx, dy) >= params_.detection_range) return 0.0;
  // Blind spot: intruder flying straight at the ownship.
  const double course_to_ownship = std::atan2(-dy, -dx);
  if (std::abs(WrapAngle(int_heading_ - course_to_ownship)) <=
      DegToRad(params_.blind_cone_deg)) {
    return 0.0;
  }
  const double bearing = WrapAngle(std::atan2(dy, dx) - own_heading_);
  const double turn = DegToRad(params_.turn_rate_deg);
  return bearing >= 0.0 ? -turn : turn;
}

StepOutcome CollisionAvoidanceEnv::Step(int frame, bool /*last_frame*/) {
  own_heading_ = WrapAngle(own_heading_ + PolicyTurn());

  const double dt = params_.dt;
  const double own_vx = own_speed_ * std::cos(own_heading_);
  const double own_vy = own_speed_ * std::sin(own_heading_);
  const double int_vx = int_speed_ * std::cos(int_heading_);
  const double int_vy = int_speed_ * std::sin(int_heading_);

  // Relative motion is linear within a frame, so the closest approach over
  // the frame is exact and fast encounters cannot tunnel through the radius.
  const double rx = int_x_ - own_x_;
  const double ry = int_y_ - own_y_;
  const double wx = int_vx - own_vx;
  const double wy = int_vy - own_vy;
  const double ww = wx * wx + wy * wy;
  double t_star = 0.0;
  if (ww > 0.0) t_star = std::clamp(-(rx * wx + ry * wy) / ww, 0.0, dt);
  const double closest = std::hypot(rx + wx * t_star, ry + wy * t_star);

  own_x_ += own_vx * dt;
  own_y_ += own_vy * dt;
  int_x_ += int_vx * dt;
  int_y_ += int_vy * dt;

  StepOutcome out;
  out.state = Observe(frame);
  const double range = out.state.observation[0];
  out.reward =
      std::min(range, params_.reward_range_cap) / params_.reward_range_cap;
  if (closest < params_.collision_radius) out.failure_kind = "collision";
  return out;
}

EnvState CollisionAvoidanceEnv::Observe(int frame) const {
  const double dx = int_x_ - own_x_;
  const double dy = int_y_ - own_y_;
  return EnvState{{std::hypot(dx, dy),
                   WrapAngle(std::atan2(dy, dx) - own_heading_),
                   WrapAngle(int_heading_ - own_heading_), own_speed_,
                   int_speed_},
                  frame};
}

}  // namespace scenfuzz
