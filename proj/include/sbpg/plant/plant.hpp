#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbpg/action.hpp"
#include "sbpg/graph.hpp"
#include "sbpg/objectives.hpp"

namespace sbpg::plant {

struct ReservoirSpec {
  std::string id;
  double capacity = 1.0;      // L
  double initial_fill = 0.0;  // L
  double lower = 0.2;         // normalized lower limit
  double upper = 0.8;         // normalized upper limit
  /// External supply: never depletes, carries no fill level and no limits.
  bool infinite = false;
};

struct ActuatorSpec {
  std::string id;
  ActuatorKind kind = ActuatorKind::belt_rpm;
  std::string source;
  std::string sink;
  double max_flow = 0.0;        // L/s at full command
  double rated_power = 0.0;     // W at full command
  double power_exponent = 1.0;  // P = rated * a^exponent
  /// Normalizer for the power utility; 0 selects rated_power.
  double power_norm = 0.0;
  DeviceRange range;

  /// Effective command after binary thresholding.
  double effective(ActionValue a) const;
  double flow(ActionValue a) const;
  double power(ActionValue a) const;
  double normalizer() const { return power_norm > 0.0 ? power_norm : rated_power; }
};

struct PlantConfig {
  std::vector<ReservoirSpec> reservoirs;
  std::vector<ActuatorSpec> actuators;  // one player per actuator, in order
  std::string demand_reservoir;
  double demand_rate = 0.125;  // L/s
  double dt = 1.0;             // s per simulation step
  double window = 10.0;        // s per utility window and policy decision

  /// Throws ConfigError on inconsistent specs, GraphError on bad topology.
  void validate() const;
  ProcessGraph graph() const;
  std::size_t reservoir_index(const std::string& id) const;
  std::size_t player_count() const { return actuators.size(); }
  std::size_t steps_per_window() const;
  /// Reservoir indices forming a player's observed state: the finite source
  /// (if any) followed by the sink.
  std::vector<std::size_t> state_reservoirs(std::size_t player) const;
};

/// Running integrals of one utility window. Reset at every window close.
struct WindowIntegrals {
  std::vector<double> v_prev;  // s outside limits, source side
  std::vector<double> v_next;  // s outside limits, sink side
  std::vector<double> energy;  // J
  double demand_ledger = 0.0;  // L, <= 0 (unmet demand)
  double elapsed = 0.0;        // s
};

struct PlantState {
  double time = 0.0;
  std::vector<double> fill;      // L per reservoir
  std::vector<double> overflow;  // L per reservoir, cumulative
  std::vector<double> power;     // W per player over the last step
  std::vector<double> energy;    // J per player, cumulative
  double initial_mass = 0.0;     // L held at reset
  double supplied = 0.0;         // L drawn from infinite sources
  double requested = 0.0;        // L of demand requested
  double delivered = 0.0;        // L of demand delivered
  WindowIntegrals window;

  double total_overflow() const;
  /// initial + supplied - (stored + overflow + delivered)
  double mass_residual() const;
};

PlantState initial_state(const PlantConfig& config);

/// True when a finite reservoir's normalized fill lies outside its limits.
bool outside_limits(const ReservoirSpec& reservoir, double fill);

struct StepMeasurements {
  std::vector<double> flow;  // L moved per actuator
  double supplied = 0.0;
  double overflow = 0.0;
  double requested = 0.0;
  double delivered = 0.0;
};

/// Advances the plant by one step of length `dt` with actions held.
/// Actuators draw min(max_flow a dt, source fill) from their source,
/// pro-rated among actuators sharing a source. Sinks are not headroom
/// limited; after demand is drawn any fill above capacity is moved to the
/// overflow accumulator. Constraint indicators use end-of-step fills.
/// Throws SimulationError on NaN state or wrong action count.
PlantState step(const PlantConfig& config, const PlantState& state,
                std::span<const ActionValue> actions, double dt,
                StepMeasurements* measurements = nullptr);

double utility_V(double v_prev, double v_next);
double utility_P(double normalized_power);
double utility_D(double demand_ledger);

/// Elementary utility values of `player` over the window integrated so far.
TermValues term_values(const PlantConfig& config, const PlantState& state, std::size_t player);

/// Normalized fills of the player's observed reservoirs.
std::vector<double> observe(const PlantConfig& config, const PlantState& state,
                            std::size_t player);

/// Single-writer simulator wrapper with window bookkeeping.
class Plant {
 public:
  explicit Plant(PlantConfig config);

  const PlantConfig& config() const { return config_; }
  const PlantState& state() const { return state_; }
  void reset();
  /// Holds `actions` for one window; returns per-player term values and
  /// clears the window integrals.
  std::vector<TermValues> run_window(std::span<const ActionValue> actions);
  std::vector<double> observe(std::size_t player) const;

 private:
  PlantConfig config_;
  PlantState state_;
};

/// Plant definition from a JSON document with "reservoirs" and "actuators"
/// arrays. Unknown keys are rejected with ConfigError.
PlantConfig plant_from_json(const nlohmann::json& doc);
nlohmann::json plant_to_json(const PlantConfig& config);

/// Reference five-player chain: supply -> belt -> hopper1 -> vacuum pump ->
/// silo1 -> vibratory conveyor -> hopper2 -> vacuum pump -> silo2 -> rotary
/// feeder -> hopper3, demand drawn from hopper3. `overrides` is merged into
/// the default description; unknown keys throw ConfigError.
PlantConfig build_bglp(const nlohmann::json& overrides = nlohmann::json::object());
nlohmann::json bglp_defaults();

}  // namespace sbpg::plant
