#include "sbpg/plant/telemetry.hpp"

#include <ostream>

namespace sbpg::plant {

TelemetryWriter::TelemetryWriter(std::ostream& out, const PlantConfig& config)
    : out_(out), players_(config.player_count()) {
  out_ << "time";
  for (const auto& r : config.reservoirs) {
    if (!r.infinite) out_ << ",fill_" << r.id;
  }
  for (const auto& a : config.actuators) out_ << ",action_" << a.id;
  for (const auto& a : config.actuators) out_ << ",power_" << a.id;
  out_ << ",overflow,delivered\n";
  fills_.clear();
  for (std::size_t r = 0; r < config.reservoirs.size(); ++r) {
    if (!config.reservoirs[r].infinite) fills_.push_back(r);
  }
}

void TelemetryWriter::record(const PlantState& state, std::span<const ActionValue> actions) {
  out_ << state.time;
  for (std::size_t r : fills_) out_ << ',' << state.fill[r];
  for (const auto& a : actions) out_ << ',' << a.value();
  for (std::size_t i = 0; i < players_; ++i) out_ << ',' << state.power[i];
  out_ << ',' << state.total_overflow() << ',' << state.delivered << '\n';
}

}  // namespace sbpg::plant
