#include "sbpg/verify/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sbpg/learn/gradient.hpp"

namespace sbpg::verify {

double follower_stationary(const learn::PolyModel& follower, double a_leader, double start) {
  double x = start;
  for (int it = 0; it < 100; ++it) {
    const double g = follower.d_follower(a_leader, x);
    const double c = follower.d2_follower(a_leader, x);
    if (c == 0.0) break;
    const double step = g / c;
    x -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

nlohmann::json GradcheckReport::to_json(bool include_points) const {
  nlohmann::json j{{"tolerance", tolerance},
                   {"points", points.size()},
                   {"max_leader_error", max_leader_error},
                   {"max_follower_error", max_follower_error},
                   {"fallbacks", fallbacks},
                   {"pass", pass}};
  if (include_points) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& p : points) {
      list.push_back({{"a_leader", p.a_leader},
                      {"a_follower", p.a_follower},
                      {"leader_analytic", p.leader_analytic},
                      {"leader_fd", p.leader_fd},
                      {"follower_analytic", p.follower_analytic},
                      {"follower_fd", p.follower_fd},
                      {"fallback", p.fallback}});
    }
    j["detail"] = std::move(list);
  }
  return j;
}

GradcheckReport gradcheck(const learn::PolyModel& leader, const learn::PolyModel& follower,
                          std::span<const std::pair<double, double>> points, double tolerance,
                          double hessian_eps, double fd_step) {
  GradcheckReport report;
  report.tolerance = tolerance;
  const double h = fd_step;
  for (const auto& [al, af] : points) {
    GradcheckPoint p;
    p.a_leader = al;

    p.follower_analytic = learn::follower_gradient(follower, al, af);
    p.follower_fd = (follower.value(al, af + h) - follower.value(al, af - h)) / (2.0 * h);
    p.follower_error =
        std::abs(p.follower_fd - p.follower_analytic) / std::max(1.0, std::abs(p.follower_analytic));
    report.max_follower_error = std::max(report.max_follower_error, p.follower_error);

    const double response = follower_stationary(follower, al, af);
    p.a_follower = response;
    const learn::LeaderGradient g =
        learn::leader_gradient(leader, follower, al, response, hessian_eps);
    p.leader_analytic = g.value;
    p.fallback = g.fallback;
    if (g.fallback) {
      ++report.fallbacks;
    } else {
      auto total = [&](double x) { return leader.value(x, follower_stationary(follower, x, response)); };
      p.leader_fd = (total(al + h) - total(al - h)) / (2.0 * h);
      p.leader_error =
          std::abs(p.leader_fd - p.leader_analytic) / std::max(1.0, std::abs(p.leader_analytic));
      report.max_leader_error = std::max(report.max_leader_error, p.leader_error);
    }
    report.points.push_back(p);
  }
  report.pass = report.max_leader_error <= tolerance && report.max_follower_error <= tolerance;
  return report;
}

}  // namespace sbpg::verify

namespace sbpg::verify {

std::pair<learn::PolyModel, learn::PolyModel> random_model_pair(learn::Rng& rng, int degree,
                                                                bool concave_follower) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> curvature(-4.0, -0.25);
  const auto basis = learn::PolyModel::basis(degree);
  std::vector<double> l(basis.size());
  std::vector<double> f(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    l[k] = coef(rng);
    f[k] = coef(rng);
    if (concave_follower && basis[k] == learn::Monomial{0, 2}) f[k] = curvature(rng);
  }
  return {learn::PolyModel(degree, std::move(l)), learn::PolyModel(degree, std::move(f))};
}

GradcheckReport gradcheck_random(std::size_t count, std::uint64_t seed, double tolerance,
                                 double hessian_eps, double fd_step) {
  learn::Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GradcheckReport total;
  total.tolerance = tolerance;
  for (std::size_t m = 0; m < count; ++m) {
    const auto [leader, follower] = random_model_pair(rng, 2, true);
    const std::pair<double, double> point{unit(rng), unit(rng)};
    const GradcheckReport r =
        gradcheck(leader, follower, std::span(&point, 1), tolerance, hessian_eps, fd_step);
    total.max_leader_error = std::max(total.max_leader_error, r.max_leader_error);
    total.max_follower_error = std::max(total.max_follower_error, r.max_follower_error);
    total.fallbacks += r.fallbacks;
    total.points.insert(total.points.end(), r.points.begin(), r.points.end());
  }
  total.pass = total.max_leader_error <= tolerance && total.max_follower_error <= tolerance;
  return total;
}

}  // namespace sbpg::verify
