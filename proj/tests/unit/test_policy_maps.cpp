#include <cmath>
#include <fstream>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "sbpg/error.hpp"
#include "sbpg/maps/map_io.hpp"
#include "sbpg/maps/performance_map.hpp"
#include "sbpg/maps/stacked_map.hpp"
#include "sbpg/maps/support_grid.hpp"

namespace sbpg::maps {
namespace {

// Independent inverse-square-distance oracle over visited cells.
double oracle_interpolate(const PerformanceMap& map, const std::vector<double>& s0, double gamma) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t c = 0; c < map.grid().cell_count(); ++c) {
    if (map.cell(c).visit_count == 0) continue;
    const auto v = map.grid().support_vector(c);
    double d2 = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) d2 += (v[k] - s0[k]) * (v[k] - s0[k]);
    const double w = 1.0 / (d2 + gamma);
    num += w * map.cell(c).best_action.value();
    den += w;
  }
  return den > 0.0 ? num / den : map.init_action().value();
}

TEST(SupportGrid, LayoutIsRowMajor) {
  SupportGrid g(2, 3, {{0.0, 1.0}, {10.0, 20.0}});
  EXPECT_EQ(g.cell_count(), 9u);
  EXPECT_DOUBLE_EQ(g.spacing(1), 5.0);
  EXPECT_EQ(g.unflatten(5), (std::vector<std::size_t>{1, 2}));
  const std::vector<std::size_t> idx{2, 1};
  EXPECT_EQ(g.flatten(idx), 7u);
  EXPECT_EQ(g.support_vector(7), (StateVector{1.0, 15.0}));
}

TEST(SupportGrid, RejectsDegenerateGrids) {
  EXPECT_THROW(SupportGrid(1, 1), std::invalid_argument);
  EXPECT_THROW(SupportGrid(0, 3), std::invalid_argument);
  EXPECT_THROW(SupportGrid(1, 3, {{1.0, 1.0}}), std::invalid_argument);
}

TEST(NearestCell, Examples) {
  SupportGrid g(1, 3);
  EXPECT_EQ(g.nearest_cell(std::vector<double>{0.24}), 0u);
  EXPECT_EQ(g.nearest_cell(std::vector<double>{0.25}), 0u);
  EXPECT_EQ(g.nearest_cell(std::vector<double>{0.26}), 1u);
  EXPECT_EQ(g.nearest_cell(std::vector<double>{7.0}), 2u);
}

TEST(LayerIndex, Examples) {
  EXPECT_EQ(layer_index(ActionValue(0.0), 15), 0u);
  EXPECT_EQ(layer_index(ActionValue(1.0), 15), 14u);
  EXPECT_EQ(layer_index(ActionValue(0.5), 15), 7u);
}

TEST(LayerIndex, MatchesFloorEverywhere) {
  for (int k = 0; k < 1000; ++k) {
    const double a = k / 999.0;
    const auto expect = std::min<std::size_t>(static_cast<std::size_t>(std::floor(a * 15)), 14);
    EXPECT_EQ(layer_index(ActionValue(a), 15), expect);
  }
}

TEST(UpdateCell, Examples) {
  PerformanceMap m(SupportGrid(1, 3));
  m.update_cell(0, ActionValue(0.3), 1.0);
  EXPECT_TRUE(m.update_cell(0, ActionValue(0.5), 2.0));
  EXPECT_EQ(m.cell(0).best_action, ActionValue(0.5));
  EXPECT_EQ(m.cell(0).best_utility, 2.0);

  m.update_cell(1, ActionValue(0.3), 1.0);
  EXPECT_FALSE(m.update_cell(1, ActionValue(0.5), 0.5));
  EXPECT_EQ(m.cell(1).best_action, ActionValue(0.3));
  EXPECT_EQ(m.cell(1).best_utility, 1.0);
  EXPECT_EQ(m.cell(1).visit_count, 2u);

  EXPECT_TRUE(m.update_cell(2, ActionValue(0.4), -3.0));
  EXPECT_EQ(m.cell(2).best_action, ActionValue(0.4));
  EXPECT_EQ(m.cell(2).best_utility, -3.0);
}

TEST(UpdateCell, RejectsNonFiniteUtility) {
  PerformanceMap m(SupportGrid(1, 3));
  EXPECT_THROW(m.update_cell(0, ActionValue(0.3), NAN), std::invalid_argument);
  EXPECT_THROW(m.assign_cell(0, ActionValue(0.3), INFINITY), std::invalid_argument);
}

TEST(AssignCell, OverwritesUnconditionally) {
  PerformanceMap m(SupportGrid(1, 3));
  m.assign_cell(0, ActionValue(0.3), 5.0);
  m.assign_cell(0, ActionValue(0.6), 1.0);
  EXPECT_EQ(m.cell(0).best_action, ActionValue(0.6));
  EXPECT_EQ(m.cell(0).best_utility, 1.0);
  EXPECT_EQ(m.cell(0).visit_count, 2u);
}

TEST(Interpolate, SingleVisitedCellEverywhere) {
  PerformanceMap m(SupportGrid(2, 5));
  m.update_cell(7, ActionValue(0.7), 1.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const std::vector<double> s{u(rng), u(rng)};
    EXPECT_NEAR(m.interpolate(s, 1e-6).value(), 0.7, 1e-15);
  }
}

TEST(Interpolate, SymmetricMidpoint) {
  PerformanceMap m(SupportGrid(1, 3));
  m.update_cell(0, ActionValue(0.2), 1.0);
  m.update_cell(2, ActionValue(0.8), 1.0);
  EXPECT_NEAR(m.interpolate(std::vector<double>{0.5}, 1e-6).value(), 0.5, 1e-15);
}

TEST(Interpolate, CoincidentSupportVectorDominates) {
  PerformanceMap m(SupportGrid(2, 4));
  for (std::size_t c = 0; c < m.grid().cell_count(); ++c) {
    m.update_cell(c, ActionValue(c % 2 == 0 ? 0.1 : 0.9), 1.0);
  }
  const auto s = m.grid().support_vector(5);
  EXPECT_NEAR(m.interpolate(s, 1e-9).value(), m.cell(5).best_action.value(), 1e-6);
}

TEST(Interpolate, UnvisitedFallsBackToInit) {
  PerformanceMap m(SupportGrid(1, 3), ActionValue(0.25));
  EXPECT_TRUE(m.interpolation_weights(std::vector<double>{0.5}, 1e-6).empty());
  EXPECT_EQ(m.interpolate(std::vector<double>{0.5}, 1e-6), ActionValue(0.25));
}

TEST(Interpolate, RejectsBadArguments) {
  PerformanceMap m(SupportGrid(1, 3));
  m.update_cell(0, ActionValue(0.2), 1.0);
  EXPECT_THROW(m.interpolate(std::vector<double>{0.5}, 0.0), std::invalid_argument);
  EXPECT_THROW(m.interpolate(std::vector<double>{1.5}, 1e-6), std::invalid_argument);
}

TEST(Interpolate, MatchesOracleAndPartitionOfUnity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t dims = 1 + trial % 3;
    PerformanceMap m(SupportGrid(dims, 2 + trial % 5));
    for (std::size_t c = 0; c < m.grid().cell_count(); ++c) {
      if (u(rng) < 0.5) m.update_cell(c, ActionValue(u(rng)), u(rng));
    }
    std::vector<double> s(dims);
    for (auto& x : s) x = u(rng);
    const double gamma = std::pow(10.0, -1 - 8 * u(rng));
    const auto w = m.interpolation_weights(s, gamma);
    double sum = 0.0;
    for (const auto& x : w) {
      EXPECT_GE(x.weight, 0.0);
      sum += x.weight;
    }
    if (!w.empty()) EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_NEAR(m.interpolate(s, gamma).value(), oracle_interpolate(m, s, gamma), 1e-12);
  }
}

TEST(CellOrInterpolate, PrefersVisitedCell) {
  PerformanceMap m(SupportGrid(1, 3));
  m.update_cell(0, ActionValue(0.2), 1.0);
  m.update_cell(2, ActionValue(0.8), 1.0);
  EXPECT_EQ(m.cell_or_interpolate(0, std::vector<double>{0.0}, 1e-6), ActionValue(0.2));
  EXPECT_NEAR(m.cell_or_interpolate(1, std::vector<double>{0.5}, 1e-6).value(), 0.5, 1e-15);
}

TEST(StackedMap, LayersShareGrid) {
  StackedMap s(SupportGrid(2, 4), 15, ActionValue(0.0));
  EXPECT_EQ(s.layer_count(), 15u);
  s.layer_for(ActionValue(0.5)).update_cell(3, ActionValue(0.4), 1.0);
  EXPECT_EQ(s.layer(7).cell(3).best_action, ActionValue(0.4));
  EXPECT_EQ(s.layer(6).cell(3).visit_count, 0u);
}

PerformanceMap sample_map() {
  PerformanceMap m(SupportGrid(2, 4, {{0.0, 1.0}, {0.0, 2.0}}), ActionValue(0.3));
  m.update_cell(1, ActionValue(0.125), 0.5);
  m.update_cell(9, ActionValue(0.875), -1.5);
  m.update_cell(9, ActionValue(0.5), -2.0);
  return m;
}

TEST(MapIo, RoundTrip) {
  const auto dir = testing::scratch_dir("map_io");
  const PerformanceMap m = sample_map();
  save_map(m, dir / "m.bin");
  EXPECT_EQ(load_map(dir / "m.bin"), m);

  StackedMap s(SupportGrid(1, 5), 3, ActionValue(1.0));
  s.layer(2).update_cell(4, ActionValue(0.25), 3.0);
  save_map(s, dir / "s.bin");
  EXPECT_EQ(load_stacked_map(dir / "s.bin"), s);
}

TEST(MapIo, TruncatedFileIsMalformed) {
  const auto dir = testing::scratch_dir("map_trunc");
  save_map(sample_map(), dir / "m.bin");
  std::ifstream in(dir / "m.bin", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  std::ofstream(dir / "t.bin", std::ios::binary) << bytes.substr(0, bytes.size() - 5);
  try {
    load_map(dir / "t.bin");
    FAIL() << "expected MapFormatError";
  } catch (const MapVersionError&) {
    FAIL() << "truncation reported as version error";
  } catch (const MapFormatError&) {
  }
}

TEST(MapIo, WrongVersionByte) {
  const auto dir = testing::scratch_dir("map_version");
  save_map(sample_map(), dir / "m.bin");
  std::fstream f(dir / "m.bin", std::ios::binary | std::ios::in | std::ios::out);
  f.seekp(7);
  f.put(static_cast<char>(kMapFormatVersion + 1));
  f.close();
  EXPECT_THROW(load_map(dir / "m.bin"), MapVersionError);
}

TEST(MapIo, KindMismatchIsMalformed) {
  const auto dir = testing::scratch_dir("map_kind");
  save_map(sample_map(), dir / "m.bin");
  EXPECT_THROW(load_stacked_map(dir / "m.bin"), MapFormatError);
}

}  // namespace
}  // namespace sbpg::maps
