#include "sbpg/plant/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "sbpg/error.hpp"
#include "sbpg/json_util.hpp"

namespace sbpg::plant {

double ActuatorSpec::effective(ActionValue a) const {
  if (kind == ActuatorKind::vibratory_binary) return a.value() >= 0.5 ? 1.0 : 0.0;
  return a.value();
}

double ActuatorSpec::flow(ActionValue a) const { return max_flow * effective(a); }

double ActuatorSpec::power(ActionValue a) const {
  const double e = effective(a);
  return e <= 0.0 ? 0.0 : rated_power * std::pow(e, power_exponent);
}

// ---------------------------------------------------------------------------

std::size_t PlantConfig::reservoir_index(const std::string& id) const {
  for (std::size_t r = 0; r < reservoirs.size(); ++r) {
    if (reservoirs[r].id == id) return r;
  }
  throw ConfigError("unknown reservoir '" + id + "'");
}

ProcessGraph PlantConfig::graph() const {
  std::vector<NodeId> acts;
  std::vector<NodeId> states;
  std::vector<Edge> edges;
  for (const auto& a : actuators) {
    acts.push_back(a.id);
    edges.push_back({a.source, a.id});
    edges.push_back({a.id, a.sink});
  }
  for (const auto& r : reservoirs) states.push_back(r.id);
  return ProcessGraph(std::move(acts), std::move(states), std::move(edges));
}

std::size_t PlantConfig::steps_per_window() const {
  return static_cast<std::size_t>(std::llround(window / dt));
}

std::vector<std::size_t> PlantConfig::state_reservoirs(std::size_t player) const {
  const ActuatorSpec& a = actuators.at(player);
  std::vector<std::size_t> out;
  const std::size_t src = reservoir_index(a.source);
  if (!reservoirs[src].infinite) out.push_back(src);
  out.push_back(reservoir_index(a.sink));
  return out;
}

void PlantConfig::validate() const {
  if (actuators.empty()) throw ConfigError("plant has no actuators");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("plant.dt must be > 0");
  if (!(window >= dt) || !std::isfinite(window)) throw ConfigError("plant.window must be >= dt");
  const double ratio = window / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw ConfigError("plant.window must be a whole multiple of plant.dt");
  }
  if (!(demand_rate >= 0.0) || !std::isfinite(demand_rate)) {
    throw ConfigError("plant.demand_rate must be >= 0");
  }
  std::set<std::string> ids;
  for (const auto& r : reservoirs) {
    if (!ids.insert(r.id).second) throw ConfigError("duplicate reservoir '" + r.id + "'");
    if (r.infinite) continue;
    if (!(r.capacity > 0.0) || !std::isfinite(r.capacity)) {
      throw ConfigError("reservoir '" + r.id + "': capacity must be > 0");
    }
    if (!(r.initial_fill >= 0.0 && r.initial_fill <= r.capacity)) {
      throw ConfigError("reservoir '" + r.id + "': initial fill outside [0, capacity]");
    }
    if (!(0.0 <= r.lower && r.lower <= r.upper && r.upper <= 1.0)) {
      throw ConfigError("reservoir '" + r.id + "': limits must satisfy 0 <= lower <= upper <= 1");
    }
  }
  for (const auto& a : actuators) {
    if (!(a.max_flow >= 0.0) || !std::isfinite(a.max_flow)) {
      throw ConfigError("actuator '" + a.id + "': max_flow must be >= 0");
    }
    if (!(a.rated_power >= 0.0) || !(a.power_exponent > 0.0) || !(a.power_norm >= 0.0)) {
      throw ConfigError("actuator '" + a.id + "': invalid power curve");
    }
    if (!(a.normalizer() > 0.0)) {
      throw ConfigError("actuator '" + a.id + "': power normalizer must be > 0");
    }
    reservoir_index(a.source);
    if (reservoirs[reservoir_index(a.sink)].infinite) {
      throw ConfigError("actuator '" + a.id + "' cannot discharge into an infinite supply");
    }
  }
  if (!demand_reservoir.empty() && reservoirs[reservoir_index(demand_reservoir)].infinite) {
    throw ConfigError("demand reservoir cannot be an infinite supply");
  }
  graph();
}

// ---------------------------------------------------------------------------

double PlantState::total_overflow() const {
  return std::accumulate(overflow.begin(), overflow.end(), 0.0);
}

double PlantState::mass_residual() const {
  const double stored = std::accumulate(fill.begin(), fill.end(), 0.0);
  return initial_mass + supplied - (stored + total_overflow() + delivered);
}

PlantState initial_state(const PlantConfig& config) {
  PlantState s;
  const std::size_t n = config.player_count();
  s.fill.resize(config.reservoirs.size(), 0.0);
  for (std::size_t r = 0; r < config.reservoirs.size(); ++r) {
    if (!config.reservoirs[r].infinite) s.fill[r] = config.reservoirs[r].initial_fill;
  }
  s.overflow.assign(config.reservoirs.size(), 0.0);
  s.power.assign(n, 0.0);
  s.energy.assign(n, 0.0);
  s.initial_mass = std::accumulate(s.fill.begin(), s.fill.end(), 0.0);
  s.window.v_prev.assign(n, 0.0);
  s.window.v_next.assign(n, 0.0);
  s.window.energy.assign(n, 0.0);
  return s;
}

bool outside_limits(const ReservoirSpec& r, double fill) {
  if (r.infinite) return false;
  const double q = fill / r.capacity;
  return q < r.lower || q > r.upper;
}

namespace {

void check_finite(const PlantState& s) {
  auto bad = [](double v) { return !std::isfinite(v); };
  if (std::any_of(s.fill.begin(), s.fill.end(), bad) ||
      std::any_of(s.overflow.begin(), s.overflow.end(), bad) || bad(s.time) ||
      bad(s.window.demand_ledger)) {
    throw SimulationError("non-finite plant state at t=" + std::to_string(s.time));
  }
}

}  // namespace

PlantState step(const PlantConfig& config, const PlantState& state,
                std::span<const ActionValue> actions, double dt, StepMeasurements* measurements) {
  const std::size_t n = config.player_count();
  const std::size_t nr = config.reservoirs.size();
  if (actions.size() != n) {
    throw SimulationError("expected " + std::to_string(n) + " actions, got " +
                          std::to_string(actions.size()));
  }
  if (!(dt > 0.0)) throw SimulationError("step length must be > 0");
  check_finite(state);

  PlantState next = state;
  WindowIntegrals& w = next.window;

  // Requested transfers, pro-rated where a source cannot cover its outflow.
  std::vector<double> request(n);
  std::vector<double> outflow(nr, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    request[i] = config.actuators[i].flow(actions[i]) * dt;
    outflow[config.reservoir_index(config.actuators[i].source)] += request[i];
  }
  std::vector<double> scale(nr, 1.0);
  for (std::size_t r = 0; r < nr; ++r) {
    if (!config.reservoirs[r].infinite && outflow[r] > state.fill[r]) {
      scale[r] = state.fill[r] / outflow[r];
    }
  }

  double supplied = 0.0;
  std::vector<double> moved(n);
  std::vector<double> out(nr, 0.0);
  std::vector<double> in(nr, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = config.reservoir_index(config.actuators[i].source);
    const std::size_t snk = config.reservoir_index(config.actuators[i].sink);
    moved[i] = request[i] * scale[src];
    if (config.reservoirs[src].infinite) {
      supplied += moved[i];
    } else {
      out[src] += moved[i];
    }
    in[snk] += moved[i];
  }
  for (std::size_t r = 0; r < nr; ++r) {
    if (config.reservoirs[r].infinite) continue;
    // Guard against a pro-rated sum exceeding the fill by one ulp.
    next.fill[r] = std::max(0.0, state.fill[r] - out[r]) + in[r];
  }

  // Demand drawn from the final reservoir.
  double requested = 0.0;
  double delivered = 0.0;
  if (!config.demand_reservoir.empty()) {
    const std::size_t d = config.reservoir_index(config.demand_reservoir);
    requested = config.demand_rate * dt;
    delivered = std::min(requested, next.fill[d]);
    next.fill[d] -= delivered;
    w.demand_ledger -= requested - delivered;
  }

  double overflow = 0.0;
  for (std::size_t r = 0; r < nr; ++r) {
    const ReservoirSpec& spec = config.reservoirs[r];
    if (spec.infinite || next.fill[r] <= spec.capacity) continue;
    const double excess = next.fill[r] - spec.capacity;
    next.overflow[r] += excess;
    next.fill[r] = spec.capacity;
    overflow += excess;
  }

  // Constraint indicators on the fills the step ends on.
  for (std::size_t i = 0; i < n; ++i) {
    const ActuatorSpec& a = config.actuators[i];
    const std::size_t src = config.reservoir_index(a.source);
    const std::size_t snk = config.reservoir_index(a.sink);
    if (outside_limits(config.reservoirs[src], next.fill[src])) w.v_prev[i] += dt;
    if (outside_limits(config.reservoirs[snk], next.fill[snk])) w.v_next[i] += dt;
  }

  for (std::size_t i = 0; i < n; ++i) {
    next.power[i] = config.actuators[i].power(actions[i]);
    next.energy[i] += next.power[i] * dt;
    w.energy[i] += next.power[i] * dt;
  }
  next.supplied += supplied;
  next.requested += requested;
  next.delivered += delivered;
  next.time += dt;
  w.elapsed += dt;
  check_finite(next);

  if (measurements != nullptr) {
    measurements->flow = std::move(moved);
    measurements->supplied = supplied;
    measurements->overflow = overflow;
    measurements->requested = requested;
    measurements->delivered = delivered;
  }
  return next;
}

double utility_V(double v_prev, double v_next) {
  return 1.0 / (1.0 + v_prev) + 1.0 / (1.0 + v_next);
}

double utility_P(double normalized_power) { return 1.0 / (1.0 + normalized_power); }

double utility_D(double demand_ledger) { return 1.0 / (1.0 - std::min(demand_ledger, 0.0)); }

TermValues term_values(const PlantConfig& config, const PlantState& state, std::size_t player) {
  const WindowIntegrals& w = state.window;
  TermValues t;
  t.prev = 1.0 / (1.0 + w.v_prev.at(player));
  t.next = 1.0 / (1.0 + w.v_next.at(player));
  const double mean_power = w.elapsed > 0.0 ? w.energy[player] / w.elapsed : 0.0;
  t.power = utility_P(mean_power / config.actuators[player].normalizer());
  t.demand = utility_D(w.demand_ledger);
  return t;
}

std::vector<double> observe(const PlantConfig& config, const PlantState& state,
                            std::size_t player) {
  std::vector<double> out;
  for (std::size_t r : config.state_reservoirs(player)) {
    out.push_back(std::clamp(state.fill[r] / config.reservoirs[r].capacity, 0.0, 1.0));
  }
  return out;
}

// ---------------------------------------------------------------------------

Plant::Plant(PlantConfig config) : config_(std::move(config)) {
  config_.validate();
  reset();
}

void Plant::reset() { state_ = initial_state(config_); }

std::vector<TermValues> Plant::run_window(std::span<const ActionValue> actions) {
  const std::size_t steps = config_.steps_per_window();
  for (std::size_t k = 0; k < steps; ++k) state_ = step(config_, state_, actions, config_.dt);
  std::vector<TermValues> out;
  out.reserve(config_.player_count());
  for (std::size_t i = 0; i < config_.player_count(); ++i) {
    out.push_back(term_values(config_, state_, i));
  }
  WindowIntegrals& w = state_.window;
  std::fill(w.v_prev.begin(), w.v_prev.end(), 0.0);
  std::fill(w.v_next.begin(), w.v_next.end(), 0.0);
  std::fill(w.energy.begin(), w.energy.end(), 0.0);
  w.demand_ledger = 0.0;
  w.elapsed = 0.0;
  return out;
}

std::vector<double> Plant::observe(std::size_t player) const {
  return plant::observe(config_, state_, player);
}

// ---------------------------------------------------------------------------

namespace {

ReservoirSpec reservoir_from_json(const nlohmann::json& j, const std::string& where) {
  require_keys(j, {"id", "capacity", "initial_fill", "lower", "upper", "infinite"}, where);
  ReservoirSpec r;
  r.id = get_string(j, "id", where);
  r.infinite = j.contains("infinite") && get_bool(j, "infinite", where);
  if (!r.infinite) {
    r.capacity = get_number(j, "capacity", where);
    r.initial_fill = j.contains("initial_fill") ? get_number(j, "initial_fill", where) : 0.0;
    if (j.contains("lower")) r.lower = get_number(j, "lower", where);
    if (j.contains("upper")) r.upper = get_number(j, "upper", where);
  }
  return r;
}

ActuatorSpec actuator_from_json(const nlohmann::json& j, const std::string& where) {
  require_keys(j,
               {"id", "kind", "source", "sink", "max_flow", "rated_power", "power_exponent",
                "power_norm"},
               where);
  ActuatorSpec a;
  a.id = get_string(j, "id", where);
  a.kind = actuator_kind_from_string(get_string(j, "kind", where));
  a.source = get_string(j, "source", where);
  a.sink = get_string(j, "sink", where);
  a.max_flow = get_number(j, "max_flow", where);
  a.rated_power = get_number(j, "rated_power", where);
  a.power_exponent = j.contains("power_exponent") ? get_number(j, "power_exponent", where) : 1.0;
  a.power_norm = j.contains("power_norm") ? get_number(j, "power_norm", where) : 0.0;
  a.range = default_device_range(a.kind);
  return a;
}

}  // namespace

PlantConfig plant_from_json(const nlohmann::json& doc) {
  require_keys(doc, {"reservoirs", "actuators", "demand_reservoir", "demand_rate", "dt", "window"},
               "plant");
  PlantConfig c;
  if (!doc.contains("reservoirs") || !doc["reservoirs"].is_array()) {
    throw ConfigError("plant.reservoirs must be an array");
  }
  if (!doc.contains("actuators") || !doc["actuators"].is_array()) {
    throw ConfigError("plant.actuators must be an array");
  }
  for (std::size_t k = 0; k < doc["reservoirs"].size(); ++k) {
    c.reservoirs.push_back(
        reservoir_from_json(doc["reservoirs"][k], "plant.reservoirs[" + std::to_string(k) + "]"));
  }
  for (std::size_t k = 0; k < doc["actuators"].size(); ++k) {
    c.actuators.push_back(
        actuator_from_json(doc["actuators"][k], "plant.actuators[" + std::to_string(k) + "]"));
  }
  c.demand_reservoir = doc.contains("demand_reservoir") ? get_string(doc, "demand_reservoir", "plant")
                                                        : std::string();
  if (doc.contains("demand_rate")) c.demand_rate = get_number(doc, "demand_rate", "plant");
  if (doc.contains("dt")) c.dt = get_number(doc, "dt", "plant");
  if (doc.contains("window")) c.window = get_number(doc, "window", "plant");
  c.validate();
  return c;
}

nlohmann::json plant_to_json(const PlantConfig& c) {
  nlohmann::json res = nlohmann::json::array();
  for (const auto& r : c.reservoirs) {
    if (r.infinite) {
      res.push_back({{"id", r.id}, {"infinite", true}});
    } else {
      res.push_back({{"id", r.id},
                     {"capacity", r.capacity},
                     {"initial_fill", r.initial_fill},
                     {"lower", r.lower},
                     {"upper", r.upper}});
    }
  }
  nlohmann::json acts = nlohmann::json::array();
  for (const auto& a : c.actuators) {
    acts.push_back({{"id", a.id},
                    {"kind", to_string(a.kind)},
                    {"source", a.source},
                    {"sink", a.sink},
                    {"max_flow", a.max_flow},
                    {"rated_power", a.rated_power},
                    {"power_exponent", a.power_exponent},
                    {"power_norm", a.power_norm}});
  }
  return {{"reservoirs", res},
          {"actuators", acts},
          {"demand_reservoir", c.demand_reservoir},
          {"demand_rate", c.demand_rate},
          {"dt", c.dt},
          {"window", c.window}};
}

}  // namespace sbpg::plant
