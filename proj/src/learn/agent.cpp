#include "sbpg/learn/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "sbpg/error.hpp"
#include "sbpg/maps/map_io.hpp"

namespace sbpg::learn {

void validate(const LearnerConfig& c) {
  if (!(c.alpha > 0.0)) throw ConfigError("learner.alpha must be > 0");
  if (c.follower_steps < 1) throw ConfigError("learner.follower_steps must be >= 1");
  if (c.poly_degree < 2) throw ConfigError("learner.poly_degree must be >= 2");
  if (!(c.ridge >= 0.0)) throw ConfigError("learner.ridge must be >= 0");
  if (!(c.hessian_eps >= 0.0)) throw ConfigError("learner.hessian_eps must be >= 0");
  if (!(c.momentum.decay >= 0.0 && c.momentum.decay < 1.0)) {
    throw ConfigError("learner.momentum_decay must lie in [0, 1)");
  }
  if (!(c.momentum.rate > 0.0)) throw ConfigError("learner.momentum_rate must be > 0");
  if (c.buffer_capacity < PolyModel::basis_size(c.poly_degree)) {
    throw ConfigError("learner.buffer_capacity is smaller than the polynomial basis");
  }
  if (!(c.explore_radius >= 0.0 && c.explore_radius <= 1.0)) {
    throw ConfigError("learner.explore_radius must lie in [0, 1]");
  }
  if (!(c.fitted_jitter >= 0.0 && c.fitted_jitter <= 1.0 && c.fitted_jitter_end >= 0.0 &&
        c.fitted_jitter_end <= 1.0)) {
    throw ConfigError("learner.fitted_jitter and fitted_jitter_end must lie in [0, 1]");
  }
  if (c.ou.enabled && !(c.ou.sigma >= 0.0 && c.ou.theta >= 0.0 && c.ou.dt > 0.0)) {
    throw ConfigError("learner.ou parameters out of range");
  }
}

namespace {

double lerp_schedule(double start, double end, int episode, int episodes) {
  if (episodes <= 1) return start;
  const double t = std::clamp(static_cast<double>(episode) / (episodes - 1), 0.0, 1.0);
  return std::lerp(start, end, t);
}

}  // namespace

double ExplorationSchedule::epsilon(int episode, int episodes) const {
  return lerp_schedule(epsilon_start, epsilon_end, episode, episodes);
}

double ExplorationSchedule::radius(int episode, int episodes) const {
  return lerp_schedule(radius_start, radius_end, episode, episodes);
}

// ---------------------------------------------------------------------------

VanillaAgent::VanillaAgent(maps::SupportGrid grid, VanillaVariant variant, MapConfig maps,
                           ExplorationSchedule schedule, std::uint64_t seed)
    : variant_(std::move(variant)),
      maps_(maps),
      schedule_(schedule),
      map_(std::move(grid), ActionValue(maps.leader_init)),
      rng_(seed) {}

void VanillaAgent::begin_episode(int episode, int episodes) {
  epsilon_ = schedule_.epsilon(episode, episodes);
  radius_ = schedule_.radius(episode, episodes);
}

const Decision& VanillaAgent::decide(std::span<const double> state, bool learning) {
  ++stats_.decisions;
  decision_.cell = map_.grid().nearest_cell(state);
  decision_.games.clear();
  if (!learning) {
    decision_.action = map_.interpolate(state, maps_.gamma);
    return decision_;
  }
  std::optional<ActionValue> base;
  const maps::Cell& cell = map_.cell(decision_.cell);
  if (cell.visit_count > 0) {
    base = cell.best_action;
  } else if (map_.visited_count() > 0) {
    base = map_.interpolate(state, maps_.gamma);
  }
  decision_.action = best_response_sample(base, epsilon_, radius_, rng_);
  return decision_;
}

void VanillaAgent::learn(const std::vector<double>& objective_utilities) {
  const double u = weighted_utility(variant_, objective_utilities);
  if (map_.update_cell(decision_.cell, decision_.action, u)) ++stats_.map_improvements;
}

void VanillaAgent::save_maps(const std::filesystem::path& dir, const std::string& prefix) const {
  maps::save_map(map_, dir / (prefix + "_policy.map"));
  std::ofstream(dir / (prefix + "_policy.json")) << maps::to_json(map_).dump(1) << '\n';
}

nlohmann::json VanillaAgent::debug_json() const {
  return {{"kind", "sbpg"}, {"visited_cells", map_.visited_count()}};
}

// ---------------------------------------------------------------------------

StackelbergAgent::StackelbergAgent(maps::SupportGrid grid, TierPlan plan, LearnerConfig learner,
                                   MapConfig maps, std::uint64_t seed)
    : plan_(std::move(plan)),
      learner_(learner),
      maps_(maps),
      leader_(grid, ActionValue(maps.leader_init)),
      rng_(seed),
      fitted_jitter_(learner.fitted_jitter) {
  validate(learner_);
  if (plan_.tiers.size() < 2) throw ConfigError("a Stackelberg plan needs at least two tiers");
  const std::size_t games = plan_.game_count();
  const ActionValue neutral = neutral_follower_action(learner_.coalition);
  for (std::size_t z = 0; z < games; ++z) {
    followers_.emplace_back(grid, maps_.layers, neutral);
    buffers_.emplace_back(grid.cell_count(), learner_.buffer_capacity);
    velocity_.emplace_back(grid.cell_count() * maps_.layers, 0.0);
    noise_.emplace_back(learner_.ou);
  }
  decision_.games.resize(games);
}

void StackelbergAgent::begin_episode(int episode, int episodes) {
  const double f = episodes > 1 ? static_cast<double>(episode) / (episodes - 1) : 0.0;
  fitted_jitter_ = learner_.fitted_jitter + f * (learner_.fitted_jitter_end - learner_.fitted_jitter);
}

ActionValue StackelbergAgent::jitter(ActionValue a, double radius) {
  if (radius <= 0.0) return a;
  std::uniform_real_distribution<double> offset(-radius, radius);
  return ActionValue::clamped(a.value() + offset(rng_));
}

const Decision& StackelbergAgent::decide(std::span<const double> state, bool learning) {
  return learning ? stacked_step(state) : policy_step(state);
}

const Decision& StackelbergAgent::policy_step(std::span<const double> state) {
  ++stats_.decisions;
  decision_.cell = leader_.grid().nearest_cell(state);
  ActionValue lead = leader_.interpolate(state, maps_.gamma);
  for (std::size_t z = 0; z < followers_.size(); ++z) {
    GameStep& g = decision_.games[z];
    g.leader = lead;
    g.layer = maps::layer_index(lead, maps_.layers);
    g.follower = followers_[z].layer(g.layer).interpolate(state, maps_.gamma);
    g.coalition = coalition_combine(g.leader, g.follower, learner_.coalition);
    g.fitted = false;
    g.hessian_fallback = false;
    lead = g.coalition;
  }
  decision_.action = lead;
  return decision_;
}

const Decision& StackelbergAgent::stacked_step(std::span<const double> state) {
  ++stats_.decisions;
  const std::size_t cell = leader_.grid().nearest_cell(state);
  const std::size_t cells = leader_.grid().cell_count();
  decision_.cell = cell;

  ActionValue lead = leader_.cell_or_interpolate(cell, state, maps_.gamma);
  for (std::size_t z = 0; z < followers_.size(); ++z) {
    GameStep& g = decision_.games[z];
    g.fitted = false;
    g.hessian_fallback = false;

    // Surrogates come from samples of earlier windows only.
    std::optional<PolyModel> leader_model;
    std::optional<PolyModel> follower_model;
    const SampleRing& ring = buffers_[z].cell(cell);
    if (ring.size() >= PolyModel::basis_size(learner_.poly_degree)) {
      const auto samples = ring.samples();
      try {
        follower_model = fit_poly(samples, Role::follower, learner_.poly_degree, learner_.ridge);
        if (z == 0) {
          leader_model = fit_poly(samples, Role::leader, learner_.poly_degree, learner_.ridge);
        }
        ++stats_.fits;
      } catch (const SingularFitError&) {
        follower_model.reset();
        leader_model.reset();
        ++stats_.singular_fits;
      }
    }

    if (z == 0) {
      const ActionValue follower_seen =
          followers_[0].layer_for(lead).cell_or_interpolate(cell, state, maps_.gamma);
      if (leader_model && follower_model) {
        const LeaderGradient grad = bounded_leader_gradient(*leader_model, *follower_model, lead.value(),
                                                    follower_seen.value(), learner_.hessian_eps);
        if (grad.fallback) {
          g.hessian_fallback = true;
          ++stats_.hessian_fallbacks;
        }
        lead = leader_update(lead, grad.value, learner_.alpha);
        leader_iterate_ = lead;
        lead = jitter(lead, fitted_jitter_);
      } else {
        lead = jitter(lead, learner_.explore_radius);
        leader_iterate_ = lead;
      }
    }

    g.leader = lead;
    g.layer = maps::layer_index(lead, maps_.layers);
    const ActionValue stored =
        followers_[z].layer(g.layer).cell_or_interpolate(cell, state, maps_.gamma);
    if (follower_model) {
      double& v = velocity_[z][g.layer * cells + cell];
      g.follower = multi_step_follower(*follower_model, lead, stored, learner_.follower_steps,
                                       learner_.momentum, v, noise_[z], rng_);
      g.fitted = true;
    } else {
      g.follower = jitter(stored, learner_.explore_radius);
    }
    g.coalition = coalition_combine(g.leader, g.follower, learner_.coalition);
    lead = g.coalition;
  }
  decision_.action = lead;
  return decision_;
}

void StackelbergAgent::learn(const std::vector<double>& objective_utilities) {
  const std::size_t cell = decision_.cell;
  for (std::size_t z = 0; z < followers_.size(); ++z) {
    const GameStep& g = decision_.games[z];
    const RoleUtilities ru = role_utilities(plan_, z, objective_utilities);
    buffers_[z].cell(cell).push({g.leader.value(), g.follower.value(), ru.leader, ru.follower});
    if (z == 0) leader_.assign_cell(cell, leader_iterate_, ru.leader);
    followers_[z].layer(g.layer).assign_cell(cell, g.follower, ru.follower);
  }
}

void StackelbergAgent::save_maps(const std::filesystem::path& dir,
                                 const std::string& prefix) const {
  maps::save_map(leader_, dir / (prefix + "_leader.map"));
  std::ofstream(dir / (prefix + "_leader.json")) << maps::to_json(leader_).dump(1) << '\n';
  for (std::size_t z = 0; z < followers_.size(); ++z) {
    const std::string name = prefix + "_follower" + std::to_string(z + 1);
    maps::save_map(followers_[z], dir / (name + ".map"));
    std::ofstream(dir / (name + ".json")) << maps::to_json(followers_[z]).dump(1) << '\n';
  }
}

nlohmann::json StackelbergAgent::debug_json() const {
  nlohmann::json games = nlohmann::json::array();
  for (std::size_t z = 0; z < buffers_.size(); ++z) {
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t c = 0; c < buffers_[z].cell_count(); ++c) {
      const SampleRing& ring = buffers_[z].cell(c);
      if (ring.size() < PolyModel::basis_size(learner_.poly_degree)) continue;
      const auto samples = ring.samples();
      nlohmann::json entry{{"cell", c}, {"samples", ring.size()}};
      try {
        entry["follower"] =
            fit_poly(samples, Role::follower, learner_.poly_degree, learner_.ridge).coefficients();
        if (z == 0) {
          entry["leader"] =
              fit_poly(samples, Role::leader, learner_.poly_degree, learner_.ridge).coefficients();
        }
      } catch (const SingularFitError& e) {
        entry["error"] = e.what();
      }
      cells.push_back(std::move(entry));
    }
    games.push_back({{"game", z + 1}, {"cells", std::move(cells)}});
  }
  return {{"kind", "stackelberg"}, {"degree", learner_.poly_degree}, {"games", std::move(games)}};
}

}  // namespace sbpg::learn
