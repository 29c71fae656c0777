#include "sbpg/verify/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sbpg/error.hpp"
#include "sbpg/plant/plant.hpp"
#include "sbpg/potential.hpp"

namespace sbpg::verify {

PlantUtilityModel::PlantUtilityModel(const ExperimentConfig& config, IndicatorState indicators)
    : plant_(config.plant),
      players_(config.players),
      coalition_(config.ds2_learner.coalition),
      indicators_(indicators) {
  plant_.validate();
}

std::size_t PlantUtilityModel::player_count() const { return plant_.player_count(); }

std::string PlantUtilityModel::player_name(std::size_t player) const {
  return plant_.actuators.at(player).id;
}

std::vector<double> PlantUtilityModel::sample_state(learn::Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> fills(plant_.reservoirs.size(), 0.0);
  for (std::size_t r = 0; r < fills.size(); ++r) {
    if (!plant_.reservoirs[r].infinite) fills[r] = unit(rng) * plant_.reservoirs[r].capacity;
  }
  return fills;
}

std::vector<std::vector<double>> PlantUtilityModel::objective_utilities(
    std::span<const double> state, std::span<const ActionValue> actions) const {
  if (state.size() != plant_.reservoirs.size()) {
    throw SimulationError("state snapshot has the wrong size");
  }
  plant::PlantState s = plant::initial_state(plant_);
  s.fill.assign(state.begin(), state.end());
  s.initial_mass = 0.0;
  plant::PlantState next = plant::step(plant_, s, actions, plant_.dt);
  if (indicators_ == IndicatorState::given) {
    for (std::size_t i = 0; i < plant_.player_count(); ++i) {
      const auto& a = plant_.actuators[i];
      const std::size_t src = plant_.reservoir_index(a.source);
      const std::size_t snk = plant_.reservoir_index(a.sink);
      const bool prev = plant::outside_limits(plant_.reservoirs[src], s.fill[src]);
      const bool next_out = plant::outside_limits(plant_.reservoirs[snk], s.fill[snk]);
      next.window.v_prev[i] = prev ? plant_.dt : 0.0;
      next.window.v_next[i] = next_out ? plant_.dt : 0.0;
    }
  }
  std::vector<std::vector<double>> out(players_.size());
  for (std::size_t i = 0; i < players_.size(); ++i) {
    const TermValues t = plant::term_values(plant_, next, i);
    for (const ObjectiveSpec& o : players_[i].objectives) out[i].push_back(o.evaluate(t));
  }
  return out;
}

std::vector<double> PlantUtilityModel::utilities(std::span<const double> state,
                                                 std::span<const ActionValue> actions) const {
  const auto per_objective = objective_utilities(state, actions);
  std::vector<double> u;
  for (std::size_t i = 0; i < players_.size(); ++i) {
    u.push_back(weighted_utility(players_[i].sbpg, per_objective[i]));
  }
  return u;
}

std::vector<SharedState> PlantUtilityModel::shared_states() const {
  std::vector<SharedState> out;
  for (std::size_t r = 0; r < plant_.reservoirs.size(); ++r) {
    if (plant_.reservoirs[r].infinite) continue;
    SharedState s{r, {}, plant_.reservoirs[r].id};
    for (std::size_t i = 0; i < plant_.actuators.size(); ++i) {
      const auto& a = plant_.actuators[i];
      if (a.source == s.name || a.sink == s.name) s.players.push_back(i);
    }
    if (s.players.size() > 1) out.push_back(std::move(s));
  }
  return out;
}

double PlantUtilityModel::state_step(std::size_t index) const {
  return 1e-4 * plant_.reservoirs.at(index).capacity;
}

// ---------------------------------------------------------------------------

CoupledUtilityModel::CoupledUtilityModel(std::shared_ptr<const UtilityModel> base,
                                         PlantedCoupling coupling,
                                         std::vector<double> first_weights)
    : base_(std::move(base)), coupling_(coupling), weights_(std::move(first_weights)) {
  if (coupling_.player >= base_->player_count() || coupling_.partner >= base_->player_count()) {
    throw ConfigError("planted coupling names an unknown player");
  }
}

std::vector<std::vector<double>> CoupledUtilityModel::objective_utilities(
    std::span<const double> state, std::span<const ActionValue> actions) const {
  auto u = base_->objective_utilities(state, actions);
  u.at(coupling_.player).at(0) += coupling_.strength * actions[coupling_.partner].value();
  return u;
}

std::vector<double> CoupledUtilityModel::utilities(std::span<const double> state,
                                                   std::span<const ActionValue> actions) const {
  auto u = base_->utilities(state, actions);
  const double w = coupling_.player < weights_.size() ? weights_[coupling_.player] : 1.0;
  u.at(coupling_.player) += w * coupling_.strength * actions[coupling_.partner].value();
  return u;
}

std::shared_ptr<const UtilityModel> make_utility_model(const ExperimentConfig& config) {
  auto base = std::make_shared<PlantUtilityModel>(config);
  if (!config.verify.planted) return base;
  std::vector<double> weights;
  for (const auto& p : config.players) weights.push_back(p.sbpg.weights.at(0));
  return std::make_shared<CoupledUtilityModel>(base, *config.verify.planted, std::move(weights));
}

// ---------------------------------------------------------------------------

nlohmann::json ConditionReport::to_json() const {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : violations) {
    nlohmann::json e{{"sample", x.sample}, {"player", x.player}, {"detail", x.detail},
                     {"magnitude", x.magnitude}};
    if (x.partner) e["partner"] = *x.partner;
    v.push_back(std::move(e));
  }
  return {{"condition", name},   {"tolerance", tolerance}, {"evaluated", evaluated},
          {"max_value", max_value}, {"pass", pass},        {"violations", std::move(v)}};
}

namespace {

struct Sampler {
  const UtilityModel& model;
  learn::Rng rng;
  double margin;

  // Role actions kept away from the box edges and the coalition clamp so
  // central differences never leave the domain.
  std::vector<RoleAction> roles() {
    std::uniform_real_distribution<double> d(margin, 0.5 - margin);
    std::vector<RoleAction> r(model.player_count());
    for (auto& x : r) {
      x.leader = d(rng);
      x.follower = d(rng);
    }
    if (model.coalition() == CoalitionMode::multiplicative) {
      std::uniform_real_distribution<double> m(margin, 1.0 - margin);
      for (auto& x : r) {
        x.leader = m(rng);
        x.follower = m(rng);
      }
    }
    return r;
  }
};

std::vector<ActionValue> executed(const UtilityModel& model, std::span<const RoleAction> roles) {
  std::vector<ActionValue> a;
  a.reserve(roles.size());
  for (const auto& r : roles) {
    a.push_back(coalition_combine(ActionValue(r.leader), ActionValue(r.follower),
                                  model.coalition()));
  }
  return a;
}

void record(ConditionReport& report, Violation v) {
  ++report.evaluated;
  report.max_value = std::max(report.max_value, v.magnitude);
  if (!(v.magnitude < report.tolerance)) {
    report.pass = false;
    report.violations.push_back(std::move(v));
  }
}

}  // namespace

ConditionReport check_cross_partials(const UtilityModel& model, const SamplingOptions& options) {
  ConditionReport report;
  report.name = "cross_partials";
  report.tolerance = options.tolerance;
  Sampler sampler{model, learn::Rng(options.seed), options.fd_step};
  const std::size_t n = model.player_count();
  const double h = options.fd_step;

  for (std::size_t s = 0; s < options.samples; ++s) {
    const auto state = model.sample_state(sampler.rng);
    const auto roles = sampler.roles();
    for (std::size_t j = 0; j < n; ++j) {
      for (int which = 0; which < 2; ++which) {
        auto plus = roles;
        auto minus = roles;
        double& p = which == 0 ? plus[j].leader : plus[j].follower;
        double& m = which == 0 ? minus[j].leader : minus[j].follower;
        p += h;
        m -= h;
        const auto up = model.objective_utilities(state, executed(model, plus));
        const auto down = model.objective_utilities(state, executed(model, minus));
        for (std::size_t i = 0; i < n; ++i) {
          if (i == j) continue;
          for (std::size_t k = 0; k < up[i].size(); ++k) {
            const double d = std::abs((up[i][k] - down[i][k]) / (2.0 * h));
            record(report, {s, i, j,
                            std::string(which == 0 ? "leader" : "follower") + " action, objective " +
                                std::to_string(k),
                            d});
          }
        }
      }
    }
  }
  return report;
}

ConditionReport check_potential_alignment(const UtilityModel& model, const PotentialFn& potential,
                                          const SamplingOptions& options,
                                          bool include_zero_deviation) {
  ConditionReport report;
  report.name = "potential_alignment";
  report.tolerance = options.tolerance;
  learn::Rng rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, model.player_count() - 1);

  for (std::size_t s = 0; s < options.samples; ++s) {
    const auto state = model.sample_state(rng);
    std::vector<ActionValue> a(model.player_count());
    for (auto& x : a) x = ActionValue(unit(rng));
    const std::size_t i = pick(rng);
    auto b = a;
    if (!(include_zero_deviation && s == 0)) b[i] = ActionValue(unit(rng));
    const auto ua = model.utilities(state, a);
    const auto ub = model.utilities(state, b);
    const double residual = std::abs((ub[i] - ua[i]) - (potential(ub) - potential(ua)));
    record(report, {s, i, std::nullopt, "unilateral deviation", residual});
  }
  return report;
}

ConditionReport check_state_partials(const UtilityModel& model, const SamplingOptions& options) {
  ConditionReport report;
  report.name = "state_partials";
  report.tolerance = options.tolerance;
  learn::Rng rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto shared = model.shared_states();

  for (std::size_t s = 0; s < options.samples; ++s) {
    const auto state = model.sample_state(rng);
    std::vector<ActionValue> a(model.player_count());
    for (auto& x : a) x = ActionValue(unit(rng));
    for (const SharedState& sh : shared) {
      const double h = model.state_step(sh.index);
      auto plus = state;
      auto minus = state;
      plus[sh.index] += h;
      minus[sh.index] = std::max(0.0, minus[sh.index] - h);
      const double width = plus[sh.index] - minus[sh.index];
      const auto up = model.utilities(plus, a);
      const auto down = model.utilities(minus, a);
      const std::size_t first = sh.players.front();
      const double ref = (up[first] - down[first]) / width;
      for (std::size_t k = 1; k < sh.players.size(); ++k) {
        const std::size_t other = sh.players[k];
        const double d = (up[other] - down[other]) / width;
        record(report, {s, first, other, sh.name, std::abs(d - ref)});
      }
    }
  }
  return report;
}

}  // namespace sbpg::verify
