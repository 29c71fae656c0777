#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include <json.hpp>

#include "sbpg/learn/gradient.hpp"
#include "sbpg/verify/conditions.hpp"

namespace sbpg::verify {

/// Exhaustive argmax over the grid {k / (points - 1)}; ties go to the
/// smaller action. Requires points >= 2.
double brute_force_best_response(const std::function<double(double)>& utility,
                                 std::size_t points = 101);

enum class ActionRole { leader, follower };

/// Best response of one role of `player` with the state and every other
/// role action frozen, scored by the player's combined utility.
double brute_force_best_response(const UtilityModel& model, std::span<const double> state,
                                 std::span<const RoleAction> roles, std::size_t player,
                                 ActionRole role, std::size_t points = 101);

struct BestResponseReport {
  std::size_t models = 0;
  double resolution = 0.01;
  double max_gap = 0.0;
  bool pass = true;

  nlohmann::json to_json() const;
};

/// Fits `models` random strictly concave quadratic follower surfaces from
/// noiseless samples, runs multi_step_follower (noise off) from a random
/// start against each with a random frozen leader action, and compares the
/// result with the brute-force argmax of the fitted surface on a grid of
/// `points` actions. Passes when every gap is within one grid cell.
BestResponseReport check_best_response(std::size_t models, const learn::MomentumParams& momentum,
                                       int steps, std::uint64_t seed, std::size_t points = 101);

}  // namespace sbpg::verify
