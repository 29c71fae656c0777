#include "sbpg/learn/gradient.hpp"

#include <cmath>
#include <stdexcept>

namespace sbpg::learn {

LeaderGradient leader_gradient(const PolyModel& leader, const PolyModel& follower, double a_leader,
                               double a_follower, double hessian_eps) {
  const double direct = leader.d_leader(a_leader, a_follower);
  const double curvature = follower.d2_follower(a_leader, a_follower);
  if (!(std::abs(curvature) >= hessian_eps)) return {direct, true};
  const double mixed = follower.d2_mixed(a_leader, a_follower);
  const double cross = leader.d_follower(a_leader, a_follower);
  return {direct - mixed / curvature * cross, false};
}

LeaderGradient bounded_leader_gradient(const PolyModel& leader, const PolyModel& follower,
                                       double a_leader, double a_follower, double hessian_eps) {
  const double omega_f = follower.d_follower(a_leader, a_follower);
  const bool pinned = (a_follower <= 0.0 && omega_f <= 0.0) || (a_follower >= 1.0 && omega_f >= 0.0);
  if (pinned) return {leader.d_leader(a_leader, a_follower), false};
  return leader_gradient(leader, follower, a_leader, a_follower, hessian_eps);
}

double follower_gradient(const PolyModel& follower, double a_leader, double a_follower) {
  return follower.d_follower(a_leader, a_follower);
}

ActionValue leader_update(ActionValue action, double omega, double alpha) {
  return ActionValue::clamped(action.value() + alpha * omega);
}

ActionValue follower_update(ActionValue action, double omega, const MomentumParams& momentum,
                            double& velocity, OuNoise& noise, Rng& rng) {
  velocity = momentum.decay * velocity + (1.0 - momentum.decay) * omega;
  return ActionValue::clamped(action.value() + momentum.rate * velocity + noise.sample(rng));
}

ActionValue multi_step_follower(const PolyModel& follower, ActionValue leader,
                                ActionValue follower_action, int steps,
                                const MomentumParams& momentum, double& velocity, OuNoise& noise,
                                Rng& rng) {
  if (steps < 1) throw std::invalid_argument("follower steps must be >= 1");
  ActionValue a = follower_action;
  for (int s = 0; s < steps; ++s) {
    const double omega = follower_gradient(follower, leader.value(), a.value());
    a = follower_update(a, omega, momentum, velocity, noise, rng);
  }
  return a;
}

ActionValue best_response_sample(std::optional<ActionValue> stored, double epsilon, double radius,
                                 Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (!stored || unit(rng) < epsilon) return ActionValue::clamped(unit(rng));
  if (radius <= 0.0) return *stored;
  std::uniform_real_distribution<double> offset(-radius, radius);
  return ActionValue::clamped(stored->value() + offset(rng));
}

}  // namespace sbpg::learn
