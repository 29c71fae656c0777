#include "sbpg/action.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sbpg/error.hpp"

namespace sbpg {

ActionValue::ActionValue(double value) : value_(value) {
  if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
    throw std::invalid_argument("action value outside [0, 1]: " + std::to_string(value));
  }
}

ActionValue ActionValue::clamped(double value) {
  if (std::isnan(value)) throw std::invalid_argument("action value is NaN");
  return ActionValue(std::clamp(value, 0.0, 1.0));
}

std::string to_string(ActuatorKind kind) {
  switch (kind) {
    case ActuatorKind::belt_rpm: return "belt_rpm";
    case ActuatorKind::vacuum_pump_timed: return "vacuum_pump_timed";
    case ActuatorKind::vibratory_binary: return "vibratory_binary";
    case ActuatorKind::rotary_feeder_rpm: return "rotary_feeder_rpm";
  }
  return "?";
}

ActuatorKind actuator_kind_from_string(const std::string& name) {
  for (auto k : {ActuatorKind::belt_rpm, ActuatorKind::vacuum_pump_timed,
                 ActuatorKind::vibratory_binary, ActuatorKind::rotary_feeder_rpm}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown actuator kind '" + name + "'");
}

double DeviceRange::denormalize(ActionValue action) const {
  if (binary) return action.value() >= 0.5 ? max_physical : min_physical;
  return min_physical + action.value() * (max_physical - min_physical);
}

DeviceRange default_device_range(ActuatorKind kind) {
  switch (kind) {
    case ActuatorKind::belt_rpm: return {0.0, 1800.0, "rpm", false};
    case ActuatorKind::vacuum_pump_timed: return {0.0, 10.0, "s", false};
    case ActuatorKind::vibratory_binary: return {0.0, 1.0, "on", true};
    case ActuatorKind::rotary_feeder_rpm: return {0.0, 1500.0, "rpm", false};
  }
  return {};
}

std::string to_string(CoalitionMode mode) {
  return mode == CoalitionMode::additive ? "additive" : "multiplicative";
}

CoalitionMode coalition_mode_from_string(const std::string& name) {
  if (name == "additive") return CoalitionMode::additive;
  if (name == "multiplicative") return CoalitionMode::multiplicative;
  throw ConfigError("unknown coalition mode '" + name + "'");
}

ActionValue coalition_combine(ActionValue leader, ActionValue follower, CoalitionMode mode) {
  const double raw = mode == CoalitionMode::additive ? leader.value() + follower.value()
                                                     : leader.value() * follower.value();
  return ActionValue(std::clamp(raw, 0.0, 1.0));
}

ActionValue coalition_fold(ActionValue leader, std::span<const ActionValue> followers,
                           CoalitionMode mode) {
  ActionValue acc = leader;
  for (auto f : followers) acc = coalition_combine(acc, f, mode);
  return acc;
}

ActionValue neutral_follower_action(CoalitionMode mode) {
  return ActionValue(mode == CoalitionMode::additive ? 0.0 : 1.0);
}

}  // namespace sbpg
