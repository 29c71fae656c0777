#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sbpg/plant/plant.hpp"

namespace sbpg::testing {

inline std::filesystem::path source_path(const std::string& relative) {
  return std::filesystem::path(SBPG_SOURCE_DIR) / relative;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sbpg_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// tank -> belt -> bin with no demand.
inline plant::PlantConfig two_tank_plant(double source_fill = 10.0, double sink_fill = 0.0,
                                         double sink_capacity = 20.0) {
  nlohmann::json doc = {
      {"reservoirs",
       {{{"id", "tank"}, {"capacity", 20.0}, {"initial_fill", source_fill}, {"lower", 0.2},
         {"upper", 0.8}},
        {{"id", "bin"}, {"capacity", sink_capacity}, {"initial_fill", sink_fill}, {"lower", 0.2},
         {"upper", 0.8}}}},
      {"actuators",
       {{{"id", "belt"}, {"kind", "belt_rpm"}, {"source", "tank"}, {"sink", "bin"},
         {"max_flow", 1.0}, {"rated_power", 100.0}, {"power_exponent", 1.0},
         {"power_norm", 0.0}}}},
      {"demand_reservoir", ""},
      {"demand_rate", 0.0},
      {"dt", 1.0},
      {"window", 1.0}};
  return plant::plant_from_json(doc);
}

}  // namespace sbpg::testing
