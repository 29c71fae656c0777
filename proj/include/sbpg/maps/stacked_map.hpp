#pragma once

#include <cstddef>
#include <vector>

#include "sbpg/maps/performance_map.hpp"

namespace sbpg::maps {

/// floor(a_L * layers) clamped to [0, layers - 1]. Requires layers >= 1.
std::size_t layer_index(ActionValue leader_action, std::size_t layers);

/// Follower policy storage: one performance map per discretized leader action.
class StackedMap {
 public:
  StackedMap() = default;
  StackedMap(SupportGrid grid, std::size_t layers, ActionValue init_action);

  std::size_t layer_count() const { return layers_.size(); }
  PerformanceMap& layer(std::size_t index) { return layers_.at(index); }
  const PerformanceMap& layer(std::size_t index) const { return layers_.at(index); }
  PerformanceMap& layer_for(ActionValue leader_action) {
    return layers_.at(layer_index(leader_action, layers_.size()));
  }
  const PerformanceMap& layer_for(ActionValue leader_action) const {
    return layers_.at(layer_index(leader_action, layers_.size()));
  }
  const SupportGrid& grid() const { return layers_.front().grid(); }

  friend bool operator==(const StackedMap&, const StackedMap&) = default;

 private:
  friend class MapCodec;
  std::vector<PerformanceMap> layers_;
};

}  // namespace sbpg::maps
