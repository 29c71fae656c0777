#pragma once

#include <span>
#include <string>

namespace sbpg {

/// Normalized actuator command in [0, 1]. All learning happens on this
/// scale; device units only appear at the simulator boundary.
class ActionValue {
 public:
  constexpr ActionValue() = default;
  /// Throws std::invalid_argument outside [0, 1] or for non-finite input.
  explicit ActionValue(double value);

  static ActionValue clamped(double value);

  constexpr double value() const { return value_; }
  constexpr explicit operator double() const { return value_; }

  friend constexpr bool operator==(ActionValue, ActionValue) = default;

 private:
  double value_ = 0.0;
};

enum class ActuatorKind { belt_rpm, vacuum_pump_timed, vibratory_binary, rotary_feeder_rpm };

std::string to_string(ActuatorKind kind);
ActuatorKind actuator_kind_from_string(const std::string& name);

struct DeviceRange {
  double min_physical = 0.0;
  double max_physical = 1.0;
  std::string unit = "";
  bool binary = false;

  /// Affine map into [min_physical, max_physical]; binary devices
  /// threshold at 0.5 and return either end of the range.
  double denormalize(ActionValue action) const;
};

DeviceRange default_device_range(ActuatorKind kind);

enum class CoalitionMode { additive, multiplicative };

std::string to_string(CoalitionMode mode);
CoalitionMode coalition_mode_from_string(const std::string& name);

ActionValue coalition_combine(ActionValue leader, ActionValue follower, CoalitionMode mode);

/// Coalition action of a stacked chain: the leader action is combined with
/// each follower in turn and the result becomes the next leader.
ActionValue coalition_fold(ActionValue leader, std::span<const ActionValue> followers,
                           CoalitionMode mode);

/// Identity element of the coalition composition (0 for additive, 1 for
/// multiplicative).
ActionValue neutral_follower_action(CoalitionMode mode);

}  // namespace sbpg
