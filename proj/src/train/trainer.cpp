#include "sbpg/train/trainer.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "sbpg/error.hpp"
#include "sbpg/maps/support_grid.hpp"
#include "sbpg/plant/plant.hpp"
#include "sbpg/potential.hpp"

namespace sbpg::train {

EpisodeMetrics aggregate(int episode, bool eval, std::vector<WindowRecord> trace) {
  EpisodeMetrics m;
  m.episode = episode;
  m.eval = eval;
  double requested = 0.0;
  double delivered = 0.0;
  double power = 0.0;
  double potential = 0.0;
  for (const WindowRecord& w : trace) {
    requested += w.requested;
    delivered += w.delivered;
    m.overflow += w.overflow;
    for (double p : w.power) power += p;
    potential += w.potential;
    m.hessian_fallbacks += w.fallbacks;
  }
  m.demand_fulfillment = requested > 0.0 ? delivered / requested : 1.0;
  if (!trace.empty()) {
    const auto n = static_cast<double>(trace.size());
    m.mean_power = power / n;
    m.mean_potential = potential / n;
  }
  m.trace = std::move(trace);
  return m;
}

TrainingPlan plan_from(const ExperimentConfig& config) {
  TrainingPlan p;
  p.variant = config.training.variant;
  p.episodes = config.training.episodes;
  p.horizon = config.training.horizon;
  p.demand_rate = config.plant.demand_rate;
  p.seed = config.training.seed;
  p.eval = config.training.eval;
  p.threads = config.training.threads;
  return p;
}

std::uint64_t player_seed(std::uint64_t seed, std::size_t player) {
  // splitmix64 finalizer over (seed, player)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(player) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::vector<std::unique_ptr<learn::Agent>> make_agents(const ExperimentConfig& config,
                                                       VariantKind variant, std::uint64_t seed) {
  std::vector<std::unique_ptr<learn::Agent>> agents;
  for (std::size_t i = 0; i < config.players.size(); ++i) {
    const maps::SupportGrid grid(config.plant.state_reservoirs(i).size(),
                                 config.maps.points_per_dim);
    const std::uint64_t s = player_seed(seed, i);
    switch (variant) {
      case VariantKind::sbpg:
        agents.push_back(std::make_unique<learn::VanillaAgent>(grid, config.players[i].sbpg,
                                                               config.maps, config.exploration, s));
        break;
      case VariantKind::ds2:
        agents.push_back(std::make_unique<learn::StackelbergAgent>(
            grid, tier_plan(config.players[i].ds2), config.ds2_learner, config.maps, s));
        break;
      case VariantKind::stack:
        agents.push_back(std::make_unique<learn::StackelbergAgent>(
            grid, tier_plan(config.players[i].stack), config.stack_learner, config.maps, s));
        break;
    }
  }
  return agents;
}

bool stack_degenerates(const ExperimentConfig& config) {
  for (const auto& p : config.players) {
    if (p.stack.hierarchy.size() != 2) return false;
  }
  return true;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

EpisodeMetrics run_episode(const ExperimentConfig& config, const TrainingPlan& plan,
                           plant::Plant& plant,
                           std::vector<std::unique_ptr<learn::Agent>>& agents, int episode,
                           bool learning) {
  plant.reset();
  const plant::PlantConfig& pc = plant.config();
  const std::size_t n = pc.player_count();
  const auto windows = static_cast<std::size_t>(std::floor(plan.horizon / pc.window + 1e-9));

  std::vector<std::size_t> finite;
  for (std::size_t r = 0; r < pc.reservoirs.size(); ++r) {
    if (!pc.reservoirs[r].infinite) finite.push_back(r);
  }

  std::vector<WindowRecord> trace;
  trace.reserve(windows);
  std::vector<std::vector<double>> states(n);
  std::vector<ActionValue> actions(n);
  std::vector<std::vector<double>> objective_utilities(n);

  for (std::size_t w = 0; w < windows; ++w) {
    for (std::size_t i = 0; i < n; ++i) states[i] = plant.observe(i);
    parallel_for(n, plan.threads, [&](std::size_t i) {
      actions[i] = agents[i]->decide(states[i], learning).action;
    });
    std::size_t fallbacks = 0;
    for (const auto& a : agents) {
      for (const auto& g : a->last_decision().games) fallbacks += g.hessian_fallback ? 1 : 0;
    }

    const plant::PlantState before = plant.state();
    const std::vector<TermValues> terms = plant.run_window(actions);
    const plant::PlantState& after = plant.state();

    WindowRecord rec;
    rec.window = w;
    rec.time = after.time;
    for (std::size_t r : finite) rec.fills.push_back(after.fill[r] / pc.reservoirs[r].capacity);
    for (std::size_t i = 0; i < n; ++i) {
      rec.actions.push_back(actions[i].value());
      rec.power.push_back((after.energy[i] - before.energy[i]) / pc.window);
      const PlayerSetup& setup = config.players[i];
      objective_utilities[i].clear();
      for (const ObjectiveSpec& o : setup.objectives) {
        objective_utilities[i].push_back(o.evaluate(terms[i]));
      }
      rec.utility.push_back(weighted_utility(setup.sbpg, objective_utilities[i]));
    }
    rec.potential = potential_value(rec.utility);
    rec.requested = after.requested - before.requested;
    rec.delivered = after.delivered - before.delivered;
    rec.overflow = after.total_overflow() - before.total_overflow();
    rec.fallbacks = fallbacks;
    trace.push_back(std::move(rec));

    if (learning) {
      parallel_for(n, plan.threads, [&](std::size_t i) { agents[i]->learn(objective_utilities[i]); });
    }
  }
  return aggregate(episode, !learning, std::move(trace));
}

}  // namespace

TrainingResult run_training(const ExperimentConfig& config, const TrainingPlan& plan,
                            const EpisodeCallback& on_episode) {
  if (plan.episodes < 0) throw ConfigError("episodes must be >= 0");
  plant::PlantConfig pc = config.plant;
  pc.demand_rate = plan.demand_rate;
  plant::Plant plant(pc);
  if (!(plan.horizon >= pc.window)) throw ConfigError("horizon must cover at least one window");

  TrainingResult result;
  result.agents = make_agents(config, plan.variant, plan.seed);
  for (int e = 0; e < plan.episodes; ++e) {
    for (auto& a : result.agents) a->begin_episode(e, plan.episodes);
    result.episodes.push_back(run_episode(config, plan, plant, result.agents, e, true));
    if (on_episode) on_episode(result.episodes.back());
  }
  if (plan.eval) {
    result.episodes.push_back(
        run_episode(config, plan, plant, result.agents, plan.episodes, false));
    if (on_episode) on_episode(result.episodes.back());
  }
  return result;
}

}  // namespace sbpg::train
