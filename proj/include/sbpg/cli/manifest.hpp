#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace sbpg::cli {

/// Inputs that determine a run's outputs. Carries no timestamps so reruns
/// reproduce it byte for byte.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string variant;
  std::string version;
  std::vector<std::string> outputs;  // relative to the manifest directory
  nlohmann::json config;             // merged document

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

inline constexpr const char* kManifestName = "manifest.json";

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);
std::optional<RunManifest> read_manifest(const std::filesystem::path& dir);

}  // namespace sbpg::cli
