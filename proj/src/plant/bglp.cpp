#include <array>
#include <string>

#include "sbpg/error.hpp"
#include "sbpg/json_util.hpp"
#include "sbpg/plant/plant.hpp"

namespace sbpg::plant {
namespace {

constexpr std::array<const char*, 6> kReservoirs = {"supply", "hopper1", "silo1",
                                                    "hopper2", "silo2", "hopper3"};
constexpr std::array<const char*, 5> kActuators = {"belt", "vacuum_pump1", "vibratory_conveyor",
                                                   "vacuum_pump2", "rotary_feeder"};

nlohmann::json reservoir(double capacity, double lower, double upper) {
  return {{"capacity", capacity},
          {"initial_fill", 0.5 * capacity},
          {"lower", lower},
          {"upper", upper}};
}

nlohmann::json actuator(const char* kind, const char* source, const char* sink, double max_flow,
                        double rated_power, double exponent) {
  return {{"kind", kind},
          {"source", source},
          {"sink", sink},
          {"max_flow", max_flow},
          {"rated_power", rated_power},
          {"power_exponent", exponent},
          {"power_norm", 0.0}};
}

}  // namespace

nlohmann::json bglp_defaults() {
  nlohmann::json reservoirs = {
      {"hopper1", reservoir(10.0, 0.2, 0.8)}, {"silo1", reservoir(17.0, 0.2, 0.8)},
      {"hopper2", reservoir(10.0, 0.2, 0.8)}, {"silo2", reservoir(17.0, 0.2, 0.8)},
      {"hopper3", reservoir(10.0, 0.2, 0.8)},
  };
  nlohmann::json actuators = {
      {"belt", actuator("belt_rpm", "supply", "hopper1", 0.35, 450.0, 2.0)},
      {"vacuum_pump1", actuator("vacuum_pump_timed", "hopper1", "silo1", 0.35, 600.0, 1.0)},
      {"vibratory_conveyor",
       actuator("vibratory_binary", "silo1", "hopper2", 0.30, 250.0, 1.0)},
      {"vacuum_pump2", actuator("vacuum_pump_timed", "hopper2", "silo2", 0.35, 600.0, 1.0)},
      {"rotary_feeder", actuator("rotary_feeder_rpm", "silo2", "hopper3", 0.35, 350.0, 2.0)},
  };
  return {{"dt", 1.0},
          {"window", 10.0},
          {"demand_rate", 0.125},
          {"reservoirs", reservoirs},
          {"actuators", actuators}};
}

PlantConfig build_bglp(const nlohmann::json& overrides) {
  nlohmann::json doc = bglp_defaults();
  merge_strict(doc, overrides.is_null() ? nlohmann::json::object() : overrides, "plant");

  nlohmann::json generic = {{"dt", doc["dt"]},
                            {"window", doc["window"]},
                            {"demand_rate", doc["demand_rate"]},
                            {"demand_reservoir", "hopper3"}};
  generic["reservoirs"] = nlohmann::json::array();
  generic["reservoirs"].push_back({{"id", kReservoirs[0]}, {"infinite", true}});
  for (std::size_t r = 1; r < kReservoirs.size(); ++r) {
    nlohmann::json spec = doc["reservoirs"][kReservoirs[r]];
    spec["id"] = kReservoirs[r];
    generic["reservoirs"].push_back(std::move(spec));
  }
  generic["actuators"] = nlohmann::json::array();
  for (const char* id : kActuators) {
    nlohmann::json spec = doc["actuators"][id];
    spec["id"] = id;
    generic["actuators"].push_back(std::move(spec));
  }
  return plant_from_json(generic);
}

}  // namespace sbpg::plant
