#include "sbpg/verify/best_response.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace sbpg::verify {

double brute_force_best_response(const std::function<double(double)>& utility,
                                 std::size_t points) {
  if (points < 2) throw std::invalid_argument("best-response grid needs at least 2 points");
  double best_a = 0.0;
  double best_u = utility(0.0);
  for (std::size_t k = 1; k < points; ++k) {
    const double a = static_cast<double>(k) / static_cast<double>(points - 1);
    const double u = utility(a);
    if (u > best_u) {
      best_u = u;
      best_a = a;
    }
  }
  return best_a;
}

double brute_force_best_response(const UtilityModel& model, std::span<const double> state,
                                 std::span<const RoleAction> roles, std::size_t player,
                                 ActionRole role, std::size_t points) {
  std::vector<RoleAction> frozen(roles.begin(), roles.end());
  auto score = [&](double a) {
    auto trial = frozen;
    (role == ActionRole::leader ? trial.at(player).leader : trial.at(player).follower) = a;
    std::vector<ActionValue> actions;
    for (const auto& r : trial) {
      actions.push_back(
          coalition_combine(ActionValue(r.leader), ActionValue(r.follower), model.coalition()));
    }
    return model.utilities(state, actions).at(player);
  };
  return brute_force_best_response(score, points);
}

}  // namespace sbpg::verify

namespace sbpg::verify {

nlohmann::json BestResponseReport::to_json() const {
  return {{"models", models}, {"resolution", resolution}, {"max_gap", max_gap}, {"pass", pass}};
}

BestResponseReport check_best_response(std::size_t models, const learn::MomentumParams& momentum,
                                       int steps, std::uint64_t seed, std::size_t points) {
  learn::Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> curvature(-4.0, -0.25);
  BestResponseReport report;
  report.models = models;
  report.resolution = 1.0 / static_cast<double>(points - 1);

  for (std::size_t m = 0; m < models; ++m) {
    // Noiseless samples of a concave quadratic, refitted by least squares.
    const std::vector<double> truth{coef(rng), coef(rng), coef(rng),
                                    coef(rng), curvature(rng), coef(rng)};
    const learn::PolyModel source(2, truth);
    std::vector<learn::Sample> samples(32);
    for (auto& s : samples) {
      s.leader_action = unit(rng);
      s.follower_action = unit(rng);
      s.follower_utility = source.value(s.leader_action, s.follower_action);
    }
    const learn::PolyModel fitted = learn::fit_poly(samples, learn::Role::follower, 2, 0.0);

    const ActionValue leader(unit(rng));
    double velocity = 0.0;
    learn::OuNoise quiet;
    const ActionValue reached = learn::multi_step_follower(
        fitted, leader, ActionValue(unit(rng)), steps, momentum, velocity, quiet, rng);
    const double oracle = brute_force_best_response(
        [&](double a) { return fitted.value(leader.value(), a); }, points);
    report.max_gap = std::max(report.max_gap, std::abs(reached.value() - oracle));
  }
  report.pass = report.max_gap <= report.resolution + 1e-12;
  return report;
}

}  // namespace sbpg::verify
