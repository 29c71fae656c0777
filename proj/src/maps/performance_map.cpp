#include "sbpg/maps/performance_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbpg::maps {

namespace {

// Slack for states that drift marginally outside the grid box.
constexpr double kBoundsSlack = 1e-9;

}  // namespace

PerformanceMap::PerformanceMap(SupportGrid grid, ActionValue init_action)
    : grid_(std::move(grid)), init_action_(init_action) {
  cells_.assign(grid_.cell_count(), Cell{init_action_, kUnvisitedUtility, 0});
}

std::size_t PerformanceMap::visited_count() const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [](const Cell& c) { return c.visit_count > 0; }));
}

bool PerformanceMap::update_cell(std::size_t index, ActionValue action, double utility) {
  if (!std::isfinite(utility)) throw std::invalid_argument("non-finite utility for map update");
  Cell& c = cells_.at(index);
  ++c.visit_count;
  if (utility > c.best_utility) {
    c.best_action = action;
    c.best_utility = utility;
    return true;
  }
  return false;
}

void PerformanceMap::assign_cell(std::size_t index, ActionValue action, double utility) {
  if (!std::isfinite(utility)) throw std::invalid_argument("non-finite utility for map update");
  Cell& c = cells_.at(index);
  ++c.visit_count;
  c.best_action = action;
  c.best_utility = utility;
}

std::vector<Weight> PerformanceMap::interpolation_weights(std::span<const double> s0,
                                                          double gamma) const {
  if (!(gamma > 0.0)) throw std::invalid_argument("interpolation gamma must be > 0");
  const std::size_t m = grid_.dims();
  if (s0.size() != m) throw std::invalid_argument("state dimension mismatch");
  std::vector<double> s(s0.begin(), s0.end());
  for (std::size_t d = 0; d < m; ++d) {
    const auto& b = grid_.bounds()[d];
    if (!std::isfinite(s[d]) || s[d] < b.lo - kBoundsSlack || s[d] > b.hi + kBoundsSlack) {
      throw std::invalid_argument("interpolation state outside the grid");
    }
    s[d] = std::clamp(s[d], b.lo, b.hi);
  }

  std::vector<Weight> weights;
  double total = 0.0;
  std::vector<std::size_t> idx(m, 0);
  for (std::size_t cell = 0; cell < cells_.size(); ++cell) {
    if (cells_[cell].visit_count > 0) {
      double d2 = 0.0;
      for (std::size_t d = 0; d < m; ++d) {
        const double diff = s[d] - grid_.coordinate(d, idx[d]);
        d2 += diff * diff;
      }
      const double w = 1.0 / (d2 + gamma);
      weights.push_back({cell, w});
      total += w;
    }
    for (std::size_t d = m; d-- > 0;) {
      if (++idx[d] < grid_.points_per_dim()) break;
      idx[d] = 0;
    }
  }
  for (auto& w : weights) w.weight /= total;
  return weights;
}

ActionValue PerformanceMap::interpolate(std::span<const double> s0, double gamma) const {
  const auto weights = interpolation_weights(s0, gamma);
  if (weights.empty()) return init_action_;
  double a = 0.0;
  for (const auto& w : weights) a += w.weight * cells_[w.cell].best_action.value();
  return ActionValue::clamped(a);
}

ActionValue PerformanceMap::cell_or_interpolate(std::size_t index, std::span<const double> s0,
                                                double gamma) const {
  const Cell& c = cells_.at(index);
  if (c.visit_count > 0) return c.best_action;
  return interpolate(s0, gamma);
}

}  // namespace sbpg::maps
