#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sbpg/config.hpp"
#include "sbpg/learn/agent.hpp"

namespace sbpg::train {

/// One utility window of an episode.
struct WindowRecord {
  std::size_t window = 0;
  double time = 0.0;             // s at window end
  std::vector<double> fills;     // normalized, finite reservoirs in plant order
  std::vector<double> actions;   // executed, per player
  std::vector<double> power;     // mean W per player over the window
  std::vector<double> utility;   // vanilla-weighted U_i per player
  double potential = 0.0;        // sum of utility
  double requested = 0.0;        // L
  double delivered = 0.0;        // L
  double overflow = 0.0;         // L
  /// Players whose leader step fell back to the plain gradient.
  std::size_t fallbacks = 0;
};

struct EpisodeMetrics {
  int episode = 0;
  bool eval = false;
  double demand_fulfillment = 1.0;  // delivered / requested
  double overflow = 0.0;            // L
  double mean_power = 0.0;          // W, summed over players
  double mean_potential = 0.0;
  std::size_t hessian_fallbacks = 0;
  std::vector<WindowRecord> trace;
};

/// Aggregates derived from the trace alone; the only code path that
/// produces them.
EpisodeMetrics aggregate(int episode, bool eval, std::vector<WindowRecord> trace);

struct TrainingPlan {
  VariantKind variant = VariantKind::ds2;
  int episodes = 9;
  double horizon = 10000.0;
  double demand_rate = 0.125;
  std::uint64_t seed = 1;
  bool eval = true;
  int threads = 1;
};

TrainingPlan plan_from(const ExperimentConfig& config);

/// Deterministic per-player stream seed.
std::uint64_t player_seed(std::uint64_t seed, std::size_t player);

std::vector<std::unique_ptr<learn::Agent>> make_agents(const ExperimentConfig& config,
                                                       VariantKind variant, std::uint64_t seed);

/// True when every player's hierarchy has exactly two objectives, so the
/// stacked variant reduces to the single leader/follower game.
bool stack_degenerates(const ExperimentConfig& config);

struct TrainingResult {
  std::vector<EpisodeMetrics> episodes;
  std::vector<std::unique_ptr<learn::Agent>> agents;
};

using EpisodeCallback = std::function<void(const EpisodeMetrics&)>;

/// Runs the training episodes in sequence with maps persisting across
/// them, then the optional eval episode with exploration off. The plant
/// restarts from its initial state each episode. `on_episode` sees every
/// finished episode before the next starts.
TrainingResult run_training(const ExperimentConfig& config, const TrainingPlan& plan,
                            const EpisodeCallback& on_episode = {});

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers; rethrows the
/// first exception.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace sbpg::train
