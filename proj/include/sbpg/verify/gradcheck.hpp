#pragma once

#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sbpg/learn/ou_noise.hpp"
#include "sbpg/learn/poly_model.hpp"

namespace sbpg::verify {

/// Stationary point of the follower surrogate in a_F for fixed a_L, by
/// Newton iteration from `start`. Exact after one step for quadratics.
double follower_stationary(const learn::PolyModel& follower, double a_leader, double start);

struct GradcheckPoint {
  double a_leader = 0.0;
  double a_follower = 0.0;     // follower response used for the leader check
  double leader_analytic = 0.0;
  double leader_fd = 0.0;
  double leader_error = 0.0;
  double follower_analytic = 0.0;
  double follower_fd = 0.0;
  double follower_error = 0.0;
  bool fallback = false;       // leader comparison skipped
};

struct GradcheckReport {
  double tolerance = 0.0;
  double max_leader_error = 0.0;
  double max_follower_error = 0.0;
  std::size_t fallbacks = 0;
  bool pass = true;
  std::vector<GradcheckPoint> points;

  nlohmann::json to_json(bool include_points = false) const;
};

/// Leader: leader_gradient at (a_L, a_F*(a_L)) against central differences
/// of a_L -> U_L(a_L, a_F*(a_L)). Follower: follower_gradient at the given
/// point against central differences of U_F in a_F. Errors are
/// |fd - analytic| / max(1, |analytic|).
GradcheckReport gradcheck(const learn::PolyModel& leader, const learn::PolyModel& follower,
                          std::span<const std::pair<double, double>> points, double tolerance,
                          double hessian_eps = 1e-6, double fd_step = 1e-4);

/// Random degree-n surrogate pair with coefficients in [-1, 1]; the
/// follower's a_F^2 coefficient is drawn from [-4, -0.25] when
/// `concave_follower` is set, which makes it strictly concave for n = 2.
std::pair<learn::PolyModel, learn::PolyModel> random_model_pair(learn::Rng& rng, int degree,
                                                                bool concave_follower);

/// gradcheck over `count` random concave degree-2 pairs, one random point
/// in the unit square per pair.
GradcheckReport gradcheck_random(std::size_t count, std::uint64_t seed, double tolerance,
                                 double hessian_eps = 1e-6, double fd_step = 1e-4);

}  // namespace sbpg::verify
