#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "sbpg/action.hpp"
#include "sbpg/plant/plant.hpp"

namespace sbpg::plant {

/// Per-step CSV log: time, fills, actions, powers.
class TelemetryWriter {
 public:
  TelemetryWriter(std::ostream& out, const PlantConfig& config);
  void record(const PlantState& state, std::span<const ActionValue> actions);

 private:
  std::ostream& out_;
  std::size_t players_;
  std::vector<std::size_t> fills_;
};

}  // namespace sbpg::plant
