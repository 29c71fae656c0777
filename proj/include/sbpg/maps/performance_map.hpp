#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sbpg/action.hpp"
#include "sbpg/maps/support_grid.hpp"

namespace sbpg::maps {

inline constexpr double kUnvisitedUtility = -std::numeric_limits<double>::infinity();

struct Cell {
  ActionValue best_action;
  double best_utility = kUnvisitedUtility;
  std::uint64_t visit_count = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct Weight {
  std::size_t cell;
  double weight;
};

/// Per support vector: the best explored action and the utility it earned.
class PerformanceMap {
 public:
  PerformanceMap() = default;
  explicit PerformanceMap(SupportGrid grid, ActionValue init_action = ActionValue(0.5));

  const SupportGrid& grid() const { return grid_; }
  ActionValue init_action() const { return init_action_; }
  const Cell& cell(std::size_t index) const { return cells_.at(index); }
  std::span<const Cell> cells() const { return cells_; }
  std::size_t visited_count() const;

  /// Replaces the stored pair iff `utility` beats the stored best; always
  /// counts the visit. Returns true when the pair was replaced.
  /// Throws std::invalid_argument for non-finite utility.
  bool update_cell(std::size_t index, ActionValue action, double utility);

  /// Overwrites the stored pair unconditionally and counts the visit. Used by
  /// gradient learners whose cell action is an iterate, not a best record.
  /// Throws std::invalid_argument for non-finite utility.
  void assign_cell(std::size_t index, ActionValue action, double utility);

  /// Normalized inverse-squared-distance weights 1/(d^2 + gamma) over the
  /// visited cells. Empty when no cell has been visited.
  std::vector<Weight> interpolation_weights(std::span<const double> s0, double gamma) const;

  /// Global interpolation of the stored actions. Falls back to the
  /// initialization action while no cell is visited.
  /// Throws std::invalid_argument if gamma <= 0 or s0 lies outside the grid.
  ActionValue interpolate(std::span<const double> s0, double gamma) const;

  /// Stored action of the cell if visited, otherwise the interpolated one.
  ActionValue cell_or_interpolate(std::size_t index, std::span<const double> s0, double gamma) const;

  friend bool operator==(const PerformanceMap&, const PerformanceMap&) = default;

 private:
  friend class MapCodec;

  SupportGrid grid_;
  ActionValue init_action_{0.5};
  std::vector<Cell> cells_;
};

}  // namespace sbpg::maps
