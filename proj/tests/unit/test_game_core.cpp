#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "sbpg/action.hpp"
#include "sbpg/config.hpp"
#include "sbpg/error.hpp"
#include "sbpg/graph.hpp"
#include "sbpg/objectives.hpp"
#include "sbpg/potential.hpp"

namespace sbpg {
namespace {

// --- graph -----------------------------------------------------------------

TEST(NeighborStates, SerialChain) {
  ProcessGraph g({"A1"}, {"s1", "s2"}, {{"s1", "A1"}, {"A1", "s2"}});
  const auto n = g.neighbor_states("A1");
  EXPECT_EQ(n.prior, (std::set<NodeId>{"s1"}));
  EXPECT_EQ(n.next, (std::set<NodeId>{"s2"}));
}

TEST(NeighborStates, ParallelNextBuffers) {
  ProcessGraph g({"A1"}, {"s1", "s2", "s3"}, {{"s1", "A1"}, {"A1", "s2"}, {"A1", "s3"}});
  EXPECT_EQ(g.neighbor_states("A1").next, (std::set<NodeId>{"s2", "s3"}));
}

TEST(NeighborStates, UnknownPlayerThrows) {
  ProcessGraph g({"A1"}, {"s1"}, {{"s1", "A1"}});
  EXPECT_THROW(g.neighbor_states("A9"), GraphError);
}

TEST(ProcessGraph, RejectsNonBipartiteEdges) {
  EXPECT_THROW(ProcessGraph({"A1", "A2"}, {"s1"}, {{"A1", "A2"}, {"s1", "A1"}}), GraphError);
  EXPECT_THROW(ProcessGraph({"A1"}, {"s1", "s2"}, {{"s1", "s2"}, {"s1", "A1"}}), GraphError);
}

TEST(ProcessGraph, RejectsIsolatedPlayerAndUnknownGlobal) {
  EXPECT_THROW(ProcessGraph({"A1", "A2"}, {"s1"}, {{"s1", "A1"}}), GraphError);
  EXPECT_THROW(ProcessGraph({"A1"}, {"s1"}, {{"s1", "A1"}}, {"s9"}), GraphError);
}

// --- actions and coalitions -------------------------------------------------

TEST(ActionValue, RejectsOutOfRange) {
  EXPECT_THROW(ActionValue(-0.01), std::invalid_argument);
  EXPECT_THROW(ActionValue(1.01), std::invalid_argument);
  EXPECT_THROW(ActionValue(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
  EXPECT_DOUBLE_EQ(ActionValue::clamped(3.0).value(), 1.0);
  EXPECT_DOUBLE_EQ(ActionValue::clamped(-3.0).value(), 0.0);
}

TEST(DeviceRange, BinaryThresholdAndAffineMap) {
  const auto binary = default_device_range(ActuatorKind::vibratory_binary);
  EXPECT_EQ(binary.denormalize(ActionValue(0.49)), 0.0);
  EXPECT_EQ(binary.denormalize(ActionValue(0.5)), 1.0);
  const auto belt = default_device_range(ActuatorKind::belt_rpm);
  EXPECT_DOUBLE_EQ(belt.denormalize(ActionValue(0.25)), 0.25 * belt.max_physical);
}

TEST(Coalition, Examples) {
  EXPECT_DOUBLE_EQ(
      coalition_combine(ActionValue(0.4), ActionValue(0.0), CoalitionMode::additive).value(), 0.4);
  EXPECT_DOUBLE_EQ(
      coalition_combine(ActionValue(0.8), ActionValue(0.5), CoalitionMode::additive).value(), 1.0);
  EXPECT_DOUBLE_EQ(
      coalition_combine(ActionValue(0.5), ActionValue(1.0), CoalitionMode::multiplicative).value(),
      0.5);
}

TEST(Coalition, NeutralFollowerIsIdentity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto mode : {CoalitionMode::additive, CoalitionMode::multiplicative}) {
    for (int k = 0; k < 1000; ++k) {
      const ActionValue a(u(rng));
      EXPECT_EQ(coalition_combine(a, neutral_follower_action(mode), mode), a);
    }
  }
}

TEST(Coalition, FoldMatchesSequentialCombine) {
  const std::vector<ActionValue> followers{ActionValue(0.1), ActionValue(0.3), ActionValue(0.2)};
  EXPECT_NEAR(coalition_fold(ActionValue(0.2), followers, CoalitionMode::additive).value(), 0.8,
              1e-15);
  EXPECT_NEAR(coalition_fold(ActionValue(0.5), followers, CoalitionMode::multiplicative).value(),
              0.5 * 0.1 * 0.3 * 0.2, 1e-15);
  EXPECT_EQ(coalition_fold(ActionValue(0.7), {}, CoalitionMode::additive), ActionValue(0.7));
}

TEST(Coalition, ModeNamesRoundTrip) {
  for (auto mode : {CoalitionMode::additive, CoalitionMode::multiplicative}) {
    EXPECT_EQ(coalition_mode_from_string(to_string(mode)), mode);
  }
  EXPECT_THROW(coalition_mode_from_string("sum"), ConfigError);
}

// --- potential --------------------------------------------------------------

TEST(Potential, Examples) {
  const std::vector<double> zeros(5, 0.0);
  EXPECT_EQ(potential_value(zeros), 0.0);
  const std::vector<double> u{1.0, 2.0, 3.0};
  EXPECT_EQ(potential_value(u), 6.0);
  const std::vector<double> bad{1.0, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(potential_value(bad), std::invalid_argument);
}

// --- objectives -------------------------------------------------------------

TEST(Objectives, CompositeEvaluatesAsSum) {
  ObjectiveSpec v{"v", {ObjectiveKind::bottleneck_overflow_prev,
                        ObjectiveKind::bottleneck_overflow_next}};
  TermValues t;
  t.prev = 0.25;
  t.next = 0.5;
  t.power = 0.9;
  EXPECT_DOUBLE_EQ(v.evaluate(t), 0.75);
}

TEST(Objectives, HierarchyMustBePermutation) {
  EXPECT_THROW(ObjectiveHierarchy({0}), ConfigError);
  EXPECT_THROW(ObjectiveHierarchy({0, 0}), ConfigError);
  EXPECT_THROW(ObjectiveHierarchy({0, 2}), ConfigError);
  EXPECT_EQ(ObjectiveHierarchy({2, 0, 1}).game_count(), 2u);
}

TEST(Objectives, Ds2RoleUtilities) {
  Ds2Variant v{{0, 1}, {2}, 0.65, std::nullopt};
  const std::vector<double> u{0.5, 1.0, 0.25};
  const auto r = role_utilities(tier_plan(v), 0, u);
  EXPECT_DOUBLE_EQ(r.leader, 1.5);
  EXPECT_DOUBLE_EQ(r.follower, 0.65 * 1.5 + 0.35 * 0.25);
  EXPECT_FALSE(r.gated);
}

TEST(Objectives, ThetaGateZeroesFollower) {
  Ds2Variant v{{0}, {1}, 0.5, 2.0};
  const auto r = role_utilities(tier_plan(v), 0, {1.9, 1.0});
  EXPECT_TRUE(r.gated);
  EXPECT_EQ(r.follower, 0.0);
  EXPECT_FALSE(role_utilities(tier_plan(v), 0, {2.0, 1.0}).gated);
}

TEST(Objectives, StackedGamesAccumulateLeaderTiers) {
  StackVariant v{ObjectiveHierarchy({1, 0, 3, 2}), {0.5, 0.65, 0.75}, {}};
  const std::vector<double> u{0.1, 0.2, 0.3, 0.4};
  const TierPlan plan = tier_plan(v);
  ASSERT_EQ(plan.game_count(), 3u);
  // game z: leader = sum of the first z+1 hierarchy entries
  const double lead[] = {0.2, 0.2 + 0.1, 0.2 + 0.1 + 0.4};
  const double next[] = {0.1, 0.4, 0.3};
  for (std::size_t z = 0; z < 3; ++z) {
    const auto r = role_utilities(plan, z, u);
    EXPECT_NEAR(r.leader, lead[z], 1e-15);
    EXPECT_NEAR(r.follower, v.beta[z] * lead[z] + (1 - v.beta[z]) * next[z], 1e-15);
  }
}

TEST(Objectives, VariantValidation) {
  EXPECT_THROW(validate_variant(VanillaVariant{{1.0}}, 2), ConfigError);
  EXPECT_THROW(validate_variant(VanillaVariant{{1.0, -1.0}}, 2), ConfigError);
  EXPECT_THROW(validate_variant(Ds2Variant{{0}, {0}, 0.5, {}}, 2), ConfigError);
  EXPECT_THROW(validate_variant(Ds2Variant{{0}, {1}, 1.5, {}}, 2), ConfigError);
  EXPECT_THROW(validate_variant(StackVariant{ObjectiveHierarchy({0, 1}), {}, {}}, 2), ConfigError);
  EXPECT_NO_THROW(validate_variant(StackVariant{ObjectiveHierarchy({0, 1}), {0.5}, {}}, 2));
}

TEST(Objectives, WeightedUtility) {
  EXPECT_DOUBLE_EQ(weighted_utility(VanillaVariant{{1.0, 0.5}}, {2.0, 4.0}), 4.0);
}

// --- config -----------------------------------------------------------------

TEST(Config, DefaultsParse) {
  const ExperimentConfig c = parse_config(nlohmann::json::object());
  EXPECT_EQ(c.players.size(), 5u);
  EXPECT_EQ(c.ds2_learner.coalition, CoalitionMode::additive);
  EXPECT_EQ(c.ds2_learner.ridge, 1e-8);
  EXPECT_EQ(c.maps.layers, 15u);
  EXPECT_EQ(c.training.episodes, 9);
  EXPECT_EQ(c.training.horizon, 10000.0);
}

TEST(Config, ReferenceHyperparametersFromPaper) {
  const ExperimentConfig c = parse_config(nlohmann::json::object());
  EXPECT_EQ(c.ds2_learner.alpha, 0.4);
  EXPECT_EQ(c.players[0].ds2.beta, 0.65);
  EXPECT_EQ(c.players[0].ds2.theta, 2.0);
  EXPECT_EQ(c.stack_learner.alpha, 0.5);
  EXPECT_EQ(c.players[4].stack.beta, (std::vector<double>{0.5, 0.65, 0.75}));
  EXPECT_FALSE(c.players[4].stack.theta[0].has_value());
  EXPECT_EQ(c.ds2_learner.momentum.rate, 0.5);
  EXPECT_EQ(c.ds2_learner.momentum.decay, 0.4);
  EXPECT_FALSE(c.ds2_learner.ou.enabled);
}

TEST(Config, FinalPlayerCarriesDemand) {
  const ExperimentConfig c = parse_config(nlohmann::json::object());
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(c.players[i].objectives.size(), 3u);
  ASSERT_EQ(c.players[4].objectives.size(), 4u);
  EXPECT_EQ(c.players[4].stack.hierarchy.game_count(), 3u);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(parse_config({{"ds2", {{"alpah", 0.3}}}}), ConfigError);
  EXPECT_THROW(load_config_document({}, {"learner.nope=1"}), ConfigError);
  EXPECT_THROW(load_config_document({}, {"novalue"}), ConfigError);
}

TEST(Config, OverridesLastWriterWins) {
  const auto doc = load_config_document({}, {"ds2.alpha=0.1", "ds2.alpha=0.3"});
  EXPECT_EQ(doc["ds2"]["alpha"].get<double>(), 0.3);
}

TEST(Config, RangeChecks) {
  EXPECT_THROW(load_config({}, {"ds2.beta=1.5"}), ConfigError);
  EXPECT_THROW(load_config({}, {"maps.points_per_dim=1"}), ConfigError);
  EXPECT_THROW(load_config({}, {"training.variant=other"}), ConfigError);
  EXPECT_THROW(load_config({}, {"learner.coalition=sum"}), ConfigError);
}

TEST(Config, HashIsStableAndSensitive) {
  const auto a = default_config_document();
  auto b = a;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b["ds2"]["alpha"] = 0.41;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"configs/bglp.json", "configs/two_objective.json",
                           "configs/planted_violation.json"}) {
    EXPECT_NO_THROW(load_config(testing::source_path(name))) << name;
  }
  EXPECT_THROW(load_config(testing::source_path("configs/missing.json")), ConfigError);
}

TEST(Config, VariantNames) {
  for (auto k : {VariantKind::sbpg, VariantKind::ds2, VariantKind::stack}) {
    EXPECT_EQ(variant_kind_from_string(to_string(k)), k);
  }
}

}  // namespace
}  // namespace sbpg
