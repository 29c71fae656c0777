#include "sbpg/maps/stacked_map.hpp"

#include <cmath>
#include <stdexcept>

namespace sbpg::maps {

std::size_t layer_index(ActionValue leader_action, std::size_t layers) {
  if (layers == 0) throw std::invalid_argument("stacked map needs at least one layer");
  const double raw = std::floor(leader_action.value() * static_cast<double>(layers));
  if (raw <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(raw), layers - 1);
}

StackedMap::StackedMap(SupportGrid grid, std::size_t layers, ActionValue init_action) {
  if (layers == 0) throw std::invalid_argument("stacked map needs at least one layer");
  layers_.assign(layers, PerformanceMap(std::move(grid), init_action));
}

}  // namespace sbpg::maps
