#pragma once

#include <cstddef>
#include <optional>

#include "sbpg/action.hpp"
#include "sbpg/learn/ou_noise.hpp"
#include "sbpg/learn/poly_model.hpp"

namespace sbpg::learn {

struct LeaderGradient {
  double value = 0.0;
  /// The follower curvature was below the safeguard; only the direct
  /// term dU_L/da_L was used.
  bool fallback = false;
};

/// Stackelberg leader field
///   dU_L/da_L - (d2U_F/da_F da_L) (d2U_F/da_F^2)^-1 dU_L/da_F
/// evaluated on the fitted surrogates.
LeaderGradient leader_gradient(const PolyModel& leader, const PolyModel& follower, double a_leader,
                               double a_follower, double hessian_eps);

/// Leader field for a follower confined to [0, 1]. When the follower sits on
/// a bound and its own field points outward, its response does not move with
/// the leader and the direct term is returned.
LeaderGradient bounded_leader_gradient(const PolyModel& leader, const PolyModel& follower,
                                       double a_leader, double a_follower, double hessian_eps);

/// Best-response field dU_F/da_F.
double follower_gradient(const PolyModel& follower, double a_leader, double a_follower);

/// clamp(a + alpha * omega, 0, 1)
ActionValue leader_update(ActionValue action, double omega, double alpha);

struct MomentumParams {
  double rate = 0.5;   // step size on the velocity
  double decay = 0.4;  // velocity retention
};

/// v <- decay v + (1 - decay) omega; a <- clamp(a + rate v + ou, 0, 1).
ActionValue follower_update(ActionValue action, double omega, const MomentumParams& momentum,
                            double& velocity, OuNoise& noise, Rng& rng);

/// Repeated follower updates against one fitted surrogate with the leader
/// action frozen. Requires steps >= 1.
ActionValue multi_step_follower(const PolyModel& follower, ActionValue leader,
                                ActionValue follower_action, int steps,
                                const MomentumParams& momentum, double& velocity, OuNoise& noise,
                                Rng& rng);

/// Vanilla best-response proposal: with probability epsilon (or without a
/// stored action) a uniform draw, otherwise the stored action perturbed
/// uniformly within +-radius and clamped.
ActionValue best_response_sample(std::optional<ActionValue> stored, double epsilon, double radius,
                                 Rng& rng);

}  // namespace sbpg::learn
