#include "sbpg/cli/manifest.hpp"

#include <fstream>

#include "sbpg/error.hpp"

namespace sbpg::cli {

nlohmann::json RunManifest::to_json() const {
  return {{"command", command}, {"config_hash", config_hash}, {"seed", seed},
          {"variant", variant}, {"version", version},         {"outputs", outputs},
          {"config", config}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.variant = j.at("variant").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.config = j.value("config", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw MetricsFormatError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
  std::ofstream out(dir / kManifestName);
  if (!out) throw Error("cannot write " + (dir / kManifestName).string());
  out << manifest.to_json().dump(2) << '\n';
}

std::optional<RunManifest> read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / kManifestName);
  if (!in) return std::nullopt;
  const nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw MetricsFormatError("manifest in " + dir.string() + " is not JSON");
  return RunManifest::from_json(j);
}

}  // namespace sbpg::cli
