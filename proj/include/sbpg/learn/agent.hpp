#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbpg/action.hpp"
#include "sbpg/learn/gradient.hpp"
#include "sbpg/learn/ou_noise.hpp"
#include "sbpg/learn/sample_buffer.hpp"
#include "sbpg/maps/performance_map.hpp"
#include "sbpg/maps/stacked_map.hpp"
#include "sbpg/objectives.hpp"

namespace sbpg::learn {

struct LearnerConfig {
  double alpha = 0.4;
  int follower_steps = 5;
  int poly_degree = 2;
  double ridge = 1e-8;
  double hessian_eps = 1e-6;
  MomentumParams momentum{};
  OuParams ou{};
  std::size_t buffer_capacity = 32;
  /// Uniform perturbation used when no surrogate can be fitted yet.
  double explore_radius = 0.1;
  double fitted_jitter = 0.0;
  double fitted_jitter_end = 0.0;
  CoalitionMode coalition = CoalitionMode::additive;
};

/// Throws ConfigError on out-of-range hyperparameters.
void validate(const LearnerConfig& config);

struct MapConfig {
  std::size_t points_per_dim = 10;
  std::size_t layers = 15;
  double gamma = 1e-6;
  double leader_init = 0.5;
};

/// Linear decay of the vanilla exploration probability and perturbation
/// radius across training episodes.
struct ExplorationSchedule {
  double epsilon_start = 1.0;
  double epsilon_end = 0.02;
  double radius_start = 0.2;
  double radius_end = 0.02;

  double epsilon(int episode, int episodes) const;
  double radius(int episode, int episodes) const;
};

/// One stacked game as executed in a window.
struct GameStep {
  ActionValue leader;
  ActionValue follower;
  ActionValue coalition;
  std::size_t layer = 0;
  bool fitted = false;
  bool hessian_fallback = false;
};

struct Decision {
  std::size_t cell = 0;
  ActionValue action;
  std::vector<GameStep> games;
};

struct LearnStats {
  std::uint64_t decisions = 0;
  std::uint64_t fits = 0;
  std::uint64_t singular_fits = 0;
  std::uint64_t hessian_fallbacks = 0;
  std::uint64_t map_improvements = 0;
};

/// Per-player learner. Decisions and updates only touch this player's own
/// maps, buffers and random stream.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual void begin_episode(int episode, int episodes) { (void)episode, (void)episodes; }
  /// Chooses the action for the coming window. With `learning` false the
  /// policy is read by global interpolation only and nothing is stored.
  virtual const Decision& decide(std::span<const double> state, bool learning) = 0;
  /// Consumes the per-objective utilities of the last decided window.
  virtual void learn(const std::vector<double>& objective_utilities) = 0;

  virtual void save_maps(const std::filesystem::path& dir, const std::string& prefix) const = 0;
  /// Per-cell fitted surrogate coefficients for inspection.
  virtual nlohmann::json debug_json() const = 0;

  const LearnStats& stats() const { return stats_; }
  const Decision& last_decision() const { return decision_; }

 protected:
  Decision decision_;
  LearnStats stats_;
};

/// Weighted-sum utility with best-response sampling.
class VanillaAgent final : public Agent {
 public:
  VanillaAgent(maps::SupportGrid grid, VanillaVariant variant, MapConfig maps,
               ExplorationSchedule schedule, std::uint64_t seed);

  void begin_episode(int episode, int episodes) override;
  const Decision& decide(std::span<const double> state, bool learning) override;
  void learn(const std::vector<double>& objective_utilities) override;
  void save_maps(const std::filesystem::path& dir, const std::string& prefix) const override;
  nlohmann::json debug_json() const override;

  const maps::PerformanceMap& map() const { return map_; }

 private:
  VanillaVariant variant_;
  MapConfig maps_;
  ExplorationSchedule schedule_;
  maps::PerformanceMap map_;
  Rng rng_;
  double epsilon_ = 1.0;
  double radius_ = 0.2;
};

/// Leader/follower learner over a chain of k-1 stacked games. The
/// two-tier plan is the single leader/follower game.
class StackelbergAgent final : public Agent {
 public:
  StackelbergAgent(maps::SupportGrid grid, TierPlan plan, LearnerConfig learner, MapConfig maps,
                   std::uint64_t seed);

  void begin_episode(int episode, int episodes) override;
  const Decision& decide(std::span<const double> state, bool learning) override;
  void learn(const std::vector<double>& objective_utilities) override;
  void save_maps(const std::filesystem::path& dir, const std::string& prefix) const override;
  nlohmann::json debug_json() const override;

  /// Algorithm body for one window: leader gradient step in the first game,
  /// follower best-response steps in every game, coalition hand-off.
  const Decision& stacked_step(std::span<const double> state);

  std::size_t game_count() const { return plan_.game_count(); }
  const maps::PerformanceMap& leader_map() const { return leader_; }
  const maps::StackedMap& follower_map(std::size_t game) const { return followers_.at(game); }
  const SampleBuffer& samples(std::size_t game) const { return buffers_.at(game); }

 private:
  const Decision& policy_step(std::span<const double> state);
  ActionValue jitter(ActionValue a, double radius);

  TierPlan plan_;
  LearnerConfig learner_;
  MapConfig maps_;
  maps::PerformanceMap leader_;
  std::vector<maps::StackedMap> followers_;
  std::vector<SampleBuffer> buffers_;
  std::vector<std::vector<double>> velocity_;  // per game, per (layer, cell)
  std::vector<OuNoise> noise_;
  Rng rng_;
  ActionValue leader_iterate_;
  double fitted_jitter_ = 0.0;
};

}  // namespace sbpg::learn
