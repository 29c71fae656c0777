#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "sbpg/maps/performance_map.hpp"
#include "sbpg/maps/stacked_map.hpp"

namespace sbpg::maps {

/// Binary layout (little endian):
///   magic "SBPGMAP" + version byte, kind byte (0 plain, 1 stacked),
///   u32 dims, u32 points, dims x (f64 lo, f64 hi), f64 init action,
///   u32 layers, then per layer per cell (f64 action, f64 utility, u64 visits).
inline constexpr std::uint8_t kMapFormatVersion = 1;

class MapCodec {
 public:
  static void write(std::ostream& out, const PerformanceMap& map);
  static void write(std::ostream& out, const StackedMap& map);
  static PerformanceMap read_plain(std::istream& in);
  static StackedMap read_stacked(std::istream& in);
};

void save_map(const PerformanceMap& map, const std::filesystem::path& path);
void save_map(const StackedMap& map, const std::filesystem::path& path);
/// Throws MapVersionError on a version mismatch, MapFormatError otherwise.
PerformanceMap load_map(const std::filesystem::path& path);
StackedMap load_stacked_map(const std::filesystem::path& path);

nlohmann::json to_json(const PerformanceMap& map);
nlohmann::json to_json(const StackedMap& map);

}  // namespace sbpg::maps
