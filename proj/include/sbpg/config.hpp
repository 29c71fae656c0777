#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbpg/learn/agent.hpp"
#include "sbpg/objectives.hpp"
#include "sbpg/plant/plant.hpp"

namespace sbpg {

enum class VariantKind { sbpg, ds2, stack };

std::string to_string(VariantKind kind);
/// Throws ConfigError for anything but "sbpg", "ds2" or "stack".
VariantKind variant_kind_from_string(const std::string& name);

/// Objectives and per-variant role assignment of one player.
struct PlayerSetup {
  std::string actuator;
  std::vector<ObjectiveSpec> objectives;
  VanillaVariant sbpg;
  Ds2Variant ds2;
  StackVariant stack;
};

struct TrainingSettings {
  int episodes = 9;
  double horizon = 10000.0;  // s per episode
  bool eval = true;
  std::uint64_t seed = 1;
  int threads = 1;
  VariantKind variant = VariantKind::ds2;
};

/// Wraps player `player`'s utility with strength * a_partner. Used to plant
/// a violation of the separability conditions.
struct PlantedCoupling {
  std::size_t player = 0;
  std::size_t partner = 1;
  double strength = 0.5;
};

struct VerifySettings {
  std::size_t samples = 200;
  double fd_step = 1e-4;
  double cross_tolerance = 1e-6;
  std::size_t alignment_samples = 1000;
  double alignment_tolerance = 1e-9;
  double state_tolerance = 1e-6;
  std::size_t gradcheck_points = 1000;
  double gradcheck_tolerance = 1e-6;
  std::size_t best_response_models = 50;
  std::optional<PlantedCoupling> planted;
};

struct ExperimentConfig {
  nlohmann::json document;  // fully merged document the run was built from
  plant::PlantConfig plant;
  std::vector<PlayerSetup> players;
  learn::LearnerConfig ds2_learner;
  learn::LearnerConfig stack_learner;
  learn::MapConfig maps;
  learn::ExplorationSchedule exploration;
  TrainingSettings training;
  VerifySettings verify;

  GameVariant variant_for(std::size_t player, VariantKind kind) const;
  const learn::LearnerConfig& learner_for(VariantKind kind) const;
};

/// Complete document with every recognised key at its default value.
nlohmann::json default_config_document();

/// Strictly merges `doc` over the defaults and validates the result.
/// Throws ConfigError (or GraphError) on any inconsistency.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Reads a JSON config file (or starts from defaults when `path` is empty),
/// then layers `section.key=value` overrides; last writer wins.
nlohmann::json load_config_document(const std::filesystem::path& path,
                                    const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

/// FNV-1a over the canonical serialization of the merged document.
std::string config_hash(const nlohmann::json& document);

}  // namespace sbpg
