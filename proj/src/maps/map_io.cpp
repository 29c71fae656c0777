#include "sbpg/maps/map_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "sbpg/error.hpp"

namespace sbpg::maps {

namespace {

constexpr std::array<char, 7> kMagic{'S', 'B', 'P', 'G', 'M', 'A', 'P'};
constexpr std::uint8_t kKindPlain = 0;
constexpr std::uint8_t kKindStacked = 1;

static_assert(std::endian::native == std::endian::little, "map codec assumes little endian");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw MapFormatError("map file truncated");
  }
  return value;
}

void write_header(std::ostream& out, std::uint8_t kind, const SupportGrid& grid, ActionValue init,
                  std::uint32_t layers) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint8_t>(out, kMapFormatVersion);
  put<std::uint8_t>(out, kind);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.dims()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.points_per_dim()));
  for (const auto& b : grid.bounds()) {
    put<double>(out, b.lo);
    put<double>(out, b.hi);
  }
  put<double>(out, init.value());
  put<std::uint32_t>(out, layers);
}

void write_cells(std::ostream& out, std::span<const Cell> cells) {
  for (const auto& c : cells) {
    put<double>(out, c.best_action.value());
    put<double>(out, c.best_utility);
    put<std::uint64_t>(out, c.visit_count);
  }
}

struct Header {
  std::uint8_t kind;
  SupportGrid grid;
  ActionValue init;
  std::uint32_t layers;
};

Header read_header(std::istream& in) {
  std::array<char, 7> magic{};
  if (!in.read(magic.data(), magic.size())) throw MapFormatError("map file truncated");
  if (magic != kMagic) throw MapFormatError("not a map file (bad magic)");
  const auto version = get<std::uint8_t>(in);
  if (version != kMapFormatVersion) {
    throw MapVersionError("unsupported map format version " + std::to_string(version));
  }
  Header h{};
  h.kind = get<std::uint8_t>(in);
  if (h.kind != kKindPlain && h.kind != kKindStacked) throw MapFormatError("unknown map kind");
  const auto dims = get<std::uint32_t>(in);
  const auto points = get<std::uint32_t>(in);
  if (dims == 0 || dims > 8 || points < 2 || points > 4096) {
    throw MapFormatError("implausible grid geometry");
  }
  std::vector<Bounds> bounds(dims);
  for (auto& b : bounds) {
    b.lo = get<double>(in);
    b.hi = get<double>(in);
  }
  try {
    h.grid = SupportGrid(dims, points, std::move(bounds));
    h.init = ActionValue(get<double>(in));
  } catch (const std::invalid_argument& e) {
    throw MapFormatError(std::string("invalid map header: ") + e.what());
  }
  h.layers = get<std::uint32_t>(in);
  if (h.layers == 0 || (h.kind == kKindPlain && h.layers != 1)) {
    throw MapFormatError("invalid layer count");
  }
  return h;
}

void read_cells(std::istream& in, std::vector<Cell>& cells) {
  for (auto& c : cells) {
    const double action = get<double>(in);
    c.best_utility = get<double>(in);
    c.visit_count = get<std::uint64_t>(in);
    try {
      c.best_action = ActionValue(action);
    } catch (const std::invalid_argument&) {
      throw MapFormatError("stored action outside [0, 1]");
    }
  }
}

void expect_eof(std::istream& in) {
  if (in.peek() != std::char_traits<char>::eof()) throw MapFormatError("trailing bytes in map file");
}

}  // namespace

void MapCodec::write(std::ostream& out, const PerformanceMap& map) {
  write_header(out, kKindPlain, map.grid_, map.init_action_, 1);
  write_cells(out, map.cells_);
}

void MapCodec::write(std::ostream& out, const StackedMap& map) {
  const auto& first = map.layers_.front();
  write_header(out, kKindStacked, first.grid_, first.init_action_,
               static_cast<std::uint32_t>(map.layers_.size()));
  for (const auto& layer : map.layers_) write_cells(out, layer.cells_);
}

PerformanceMap MapCodec::read_plain(std::istream& in) {
  const Header h = read_header(in);
  if (h.kind != kKindPlain) throw MapFormatError("expected a plain performance map");
  PerformanceMap map(h.grid, h.init);
  read_cells(in, map.cells_);
  expect_eof(in);
  return map;
}

StackedMap MapCodec::read_stacked(std::istream& in) {
  const Header h = read_header(in);
  if (h.kind != kKindStacked) throw MapFormatError("expected a stacked performance map");
  StackedMap map(h.grid, h.layers, h.init);
  for (auto& layer : map.layers_) read_cells(in, layer.cells_);
  expect_eof(in);
  return map;
}

namespace {

template <typename Map>
void save_impl(const Map& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  MapCodec::write(out, map);
  if (!out) throw Error("failed writing " + path.string());
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MapFormatError("cannot open " + path.string());
  return in;
}

}  // namespace

void save_map(const PerformanceMap& map, const std::filesystem::path& path) { save_impl(map, path); }
void save_map(const StackedMap& map, const std::filesystem::path& path) { save_impl(map, path); }

PerformanceMap load_map(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return MapCodec::read_plain(in);
}

StackedMap load_stacked_map(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return MapCodec::read_stacked(in);
}

nlohmann::json to_json(const PerformanceMap& map) {
  nlohmann::json j;
  const auto& g = map.grid();
  j["dims"] = g.dims();
  j["points_per_dim"] = g.points_per_dim();
  auto& bounds = j["bounds"] = nlohmann::json::array();
  for (const auto& b : g.bounds()) bounds.push_back({b.lo, b.hi});
  j["init_action"] = map.init_action().value();
  auto& cells = j["cells"] = nlohmann::json::array();
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const auto& c = map.cell(i);
    if (c.visit_count == 0) continue;
    cells.push_back({{"index", i},
                     {"state", g.support_vector(i)},
                     {"action", c.best_action.value()},
                     {"utility", c.best_utility},
                     {"visits", c.visit_count}});
  }
  return j;
}

nlohmann::json to_json(const StackedMap& map) {
  nlohmann::json j;
  j["layers"] = nlohmann::json::array();
  for (std::size_t l = 0; l < map.layer_count(); ++l) j["layers"].push_back(to_json(map.layer(l)));
  return j;
}

}  // namespace sbpg::maps
