#include "sbpg/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "sbpg/error.hpp"
#include "sbpg/json_util.hpp"

namespace sbpg {

std::string to_string(VariantKind kind) {
  switch (kind) {
    case VariantKind::sbpg: return "sbpg";
    case VariantKind::ds2: return "ds2";
    case VariantKind::stack: return "stack";
  }
  return "?";
}

VariantKind variant_kind_from_string(const std::string& name) {
  if (name == "sbpg") return VariantKind::sbpg;
  if (name == "ds2") return VariantKind::ds2;
  if (name == "stack") return VariantKind::stack;
  throw ConfigError("unknown variant '" + name + "' (expected sbpg, ds2 or stack)");
}

namespace {

nlohmann::json objective(const char* id, std::vector<std::string> terms, double weight) {
  return {{"id", id}, {"terms", terms}, {"weight", weight}};
}

nlohmann::json default_player(const char* actuator, bool demand) {
  nlohmann::json objs = nlohmann::json::array();
  objs.push_back(objective("vp", {"bottleneck_overflow_prev"}, 1.0));
  objs.push_back(objective("vs", {"bottleneck_overflow_next"}, 1.0));
  if (demand) objs.push_back(objective("d", {"demand"}, 1.0));
  objs.push_back(objective("p", {"power"}, 1.0));
  nlohmann::json leader = demand ? nlohmann::json{"vp", "vs", "d"} : nlohmann::json{"vp", "vs"};
  nlohmann::json hierarchy =
      demand ? nlohmann::json{"vs", "vp", "d", "p"} : nlohmann::json{"vs", "vp", "p"};
  return {{"actuator", actuator},
          {"objectives", objs},
          {"ds2", {{"leader", leader}, {"follower", {"p"}}}},
          {"stack", {{"hierarchy", hierarchy}}}};
}

std::size_t objective_index(const PlayerSetup& p, const std::string& id, const std::string& where) {
  for (std::size_t k = 0; k < p.objectives.size(); ++k) {
    if (p.objectives[k].id == id) return k;
  }
  throw ConfigError(where + ": unknown objective id '" + id + "'");
}

std::vector<std::size_t> objective_indices(const PlayerSetup& p, const nlohmann::json& ids,
                                           const std::string& where) {
  if (!ids.is_array()) throw ConfigError(where + ": expected an array of objective ids");
  std::vector<std::size_t> out;
  for (const auto& id : ids) {
    if (!id.is_string()) throw ConfigError(where + ": objective ids must be strings");
    out.push_back(objective_index(p, id.get<std::string>(), where));
  }
  return out;
}

std::optional<double> optional_number(const nlohmann::json& v, const std::string& where) {
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) throw ConfigError(where + ": expected a number or null");
  return v.get<double>();
}

PlayerSetup parse_player(const nlohmann::json& j, const nlohmann::json& ds2,
                         const nlohmann::json& stack, const std::string& where) {
  require_keys(j, {"actuator", "objectives", "ds2", "stack"}, where);
  PlayerSetup p;
  p.actuator = get_string(j, "actuator", where);
  if (!j.contains("objectives") || !j["objectives"].is_array() || j["objectives"].empty()) {
    throw ConfigError(where + ".objectives must be a non-empty array");
  }
  for (std::size_t k = 0; k < j["objectives"].size(); ++k) {
    const auto& o = j["objectives"][k];
    const std::string w = where + ".objectives[" + std::to_string(k) + "]";
    require_keys(o, {"id", "terms", "weight"}, w);
    ObjectiveSpec spec;
    spec.id = get_string(o, "id", w);
    if (!o.contains("terms") || !o["terms"].is_array() || o["terms"].empty()) {
      throw ConfigError(w + ".terms must be a non-empty array");
    }
    for (const auto& t : o["terms"]) {
      if (!t.is_string()) throw ConfigError(w + ".terms must hold strings");
      spec.terms.push_back(objective_kind_from_string(t.get<std::string>()));
    }
    for (const auto& existing : p.objectives) {
      if (existing.id == spec.id) throw ConfigError(w + ": duplicate objective id");
    }
    p.objectives.push_back(std::move(spec));
    p.sbpg.weights.push_back(get_number(o, "weight", w));
  }

  const auto& d = j.contains("ds2") ? j["ds2"] : nlohmann::json::object();
  require_keys(d, {"leader", "follower"}, where + ".ds2");
  if (!d.contains("leader") || !d.contains("follower")) {
    throw ConfigError(where + ".ds2 needs leader and follower objective ids");
  }
  p.ds2.leader = objective_indices(p, d["leader"], where + ".ds2.leader");
  p.ds2.follower = objective_indices(p, d["follower"], where + ".ds2.follower");
  p.ds2.beta = get_number(ds2, "beta", "ds2");
  p.ds2.theta = optional_number(ds2["theta"], "ds2.theta");

  const auto& s = j.contains("stack") ? j["stack"] : nlohmann::json::object();
  require_keys(s, {"hierarchy"}, where + ".stack");
  if (!s.contains("hierarchy")) throw ConfigError(where + ".stack needs a hierarchy");
  p.stack.hierarchy =
      ObjectiveHierarchy(objective_indices(p, s["hierarchy"], where + ".stack.hierarchy"));
  const std::size_t games = p.stack.hierarchy.game_count();
  const auto& betas = stack["beta"];
  if (!betas.is_array() || betas.size() < games) {
    throw ConfigError("stack.beta needs at least " + std::to_string(games) + " entries for " +
                      where);
  }
  for (std::size_t z = 0; z < games; ++z) {
    if (!betas[z].is_number()) throw ConfigError("stack.beta entries must be numbers");
    p.stack.beta.push_back(betas[z].get<double>());
  }
  const auto& theta = stack["theta"];
  for (std::size_t z = 0; z < games; ++z) {
    if (theta.is_array()) {
      if (z >= theta.size()) throw ConfigError("stack.theta has too few entries for " + where);
      p.stack.theta.push_back(optional_number(theta[z], "stack.theta"));
    } else {
      p.stack.theta.push_back(optional_number(theta, "stack.theta"));
    }
  }

  validate_variant(p.sbpg, p.objectives.size());
  validate_variant(p.ds2, p.objectives.size());
  validate_variant(p.stack, p.objectives.size());
  return p;
}

learn::LearnerConfig parse_learner(const nlohmann::json& l, double alpha) {
  learn::LearnerConfig c;
  c.alpha = alpha;
  c.follower_steps = get_int(l, "follower_steps", "learner");
  c.poly_degree = get_int(l, "poly_degree", "learner");
  c.ridge = get_number(l, "ridge", "learner");
  c.hessian_eps = get_number(l, "hessian_eps", "learner");
  c.momentum.rate = get_number(l, "momentum_rate", "learner");
  c.momentum.decay = get_number(l, "momentum_decay", "learner");
  const int capacity = get_int(l, "buffer_capacity", "learner");
  if (capacity < 1) throw ConfigError("learner.buffer_capacity must be >= 1");
  c.buffer_capacity = static_cast<std::size_t>(capacity);
  c.explore_radius = get_number(l, "explore_radius", "learner");
  c.fitted_jitter = get_number(l, "fitted_jitter", "learner");
  c.fitted_jitter_end = get_number(l, "fitted_jitter_end", "learner");
  c.coalition = coalition_mode_from_string(get_string(l, "coalition", "learner"));
  const auto& ou = l["ou"];
  c.ou.enabled = get_bool(ou, "enabled", "learner.ou");
  c.ou.theta = get_number(ou, "theta", "learner.ou");
  c.ou.sigma = get_number(ou, "sigma", "learner.ou");
  c.ou.dt = get_number(ou, "dt", "learner.ou");
  learn::validate(c);
  return c;
}

std::size_t positive_count(const nlohmann::json& obj, const std::string& key,
                           const std::string& where) {
  const int v = get_int(obj, key, where);
  if (v < 1) throw ConfigError(where + "." + key + " must be >= 1");
  return static_cast<std::size_t>(v);
}

}  // namespace

nlohmann::json default_config_document() {
  nlohmann::json players = nlohmann::json::array();
  players.push_back(default_player("belt", false));
  players.push_back(default_player("vacuum_pump1", false));
  players.push_back(default_player("vibratory_conveyor", false));
  players.push_back(default_player("vacuum_pump2", false));
  players.push_back(default_player("rotary_feeder", true));
  return {
      {"plant", plant::bglp_defaults()},
      {"players", players},
      {"sbpg",
       {{"epsilon_start", 1.0}, {"epsilon_end", 0.02}, {"radius_start", 0.2}, {"radius_end", 0.02}}},
      {"ds2", {{"alpha", 0.4}, {"beta", 0.65}, {"theta", 2.0}}},
      {"stack", {{"alpha", 0.5}, {"beta", {0.5, 0.65, 0.75}}, {"theta", nullptr}}},
      {"learner",
       {{"follower_steps", 5},
        {"poly_degree", 2},
        {"ridge", 1e-8},
        {"hessian_eps", 1e-6},
        {"momentum_rate", 0.5},
        {"momentum_decay", 0.4},
        {"buffer_capacity", 32},
        {"explore_radius", 0.1},
        {"fitted_jitter", 0.0},
        {"fitted_jitter_end", 0.0},
        {"coalition", "additive"},
        {"ou", {{"enabled", false}, {"theta", 0.15}, {"sigma", 0.2}, {"dt", 1.0}}}}},
      {"maps", {{"points_per_dim", 10}, {"layers", 15}, {"gamma", 1e-6}, {"leader_init", 0.5}}},
      {"training",
       {{"episodes", 9},
        {"horizon", 10000.0},
        {"eval", true},
        {"seed", 1},
        {"threads", 1},
        {"variant", "ds2"}}},
      {"verify",
       {{"samples", 200},
        {"fd_step", 1e-4},
        {"cross_tolerance", 1e-6},
        {"alignment_samples", 1000},
        {"alignment_tolerance", 1e-9},
        {"state_tolerance", 1e-6},
        {"gradcheck_points", 1000},
        {"gradcheck_tolerance", 1e-6},
        {"best_response_models", 50},
        {"planted_coupling", nullptr}}},
  };
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
  ExperimentConfig c;
  c.document = default_config_document();
  merge_strict(c.document, doc.is_null() ? nlohmann::json::object() : doc);
  const nlohmann::json& d = c.document;

  c.plant = plant::build_bglp(d["plant"]);

  const auto& players = d["players"];
  if (!players.is_array() || players.size() != c.plant.player_count()) {
    throw ConfigError("players must list one entry per actuator (" +
                      std::to_string(c.plant.player_count()) + ")");
  }
  for (std::size_t i = 0; i < players.size(); ++i) {
    const std::string where = "players[" + std::to_string(i) + "]";
    c.players.push_back(parse_player(players[i], d["ds2"], d["stack"], where));
    if (c.players.back().actuator != c.plant.actuators[i].id) {
      throw ConfigError(where + ".actuator must be '" + c.plant.actuators[i].id + "'");
    }
  }

  require_keys(d["sbpg"], {"epsilon_start", "epsilon_end", "radius_start", "radius_end"}, "sbpg");
  c.exploration.epsilon_start = get_number(d["sbpg"], "epsilon_start", "sbpg");
  c.exploration.epsilon_end = get_number(d["sbpg"], "epsilon_end", "sbpg");
  c.exploration.radius_start = get_number(d["sbpg"], "radius_start", "sbpg");
  c.exploration.radius_end = get_number(d["sbpg"], "radius_end", "sbpg");
  for (double v : {c.exploration.epsilon_start, c.exploration.epsilon_end,
                   c.exploration.radius_start, c.exploration.radius_end}) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("sbpg exploration values must lie in [0, 1]");
  }

  c.ds2_learner = parse_learner(d["learner"], get_number(d["ds2"], "alpha", "ds2"));
  c.stack_learner = parse_learner(d["learner"], get_number(d["stack"], "alpha", "stack"));

  const auto& m = d["maps"];
  c.maps.points_per_dim = positive_count(m, "points_per_dim", "maps");
  if (c.maps.points_per_dim < 2) throw ConfigError("maps.points_per_dim must be >= 2");
  c.maps.layers = positive_count(m, "layers", "maps");
  c.maps.gamma = get_number(m, "gamma", "maps");
  if (!(c.maps.gamma > 0.0)) throw ConfigError("maps.gamma must be > 0");
  c.maps.leader_init = get_number(m, "leader_init", "maps");
  if (!(c.maps.leader_init >= 0.0 && c.maps.leader_init <= 1.0)) {
    throw ConfigError("maps.leader_init must lie in [0, 1]");
  }

  const auto& t = d["training"];
  c.training.episodes = get_int(t, "episodes", "training");
  if (c.training.episodes < 0) throw ConfigError("training.episodes must be >= 0");
  c.training.horizon = get_number(t, "horizon", "training");
  if (!(c.training.horizon >= c.plant.window)) {
    throw ConfigError("training.horizon must cover at least one window");
  }
  c.training.eval = get_bool(t, "eval", "training");
  if (!t["seed"].is_number_integer() || t["seed"].get<std::int64_t>() < 0) {
    throw ConfigError("training.seed must be an integer >= 0");
  }
  c.training.seed = t["seed"].get<std::uint64_t>();
  c.training.threads = get_int(t, "threads", "training");
  if (c.training.threads < 1) throw ConfigError("training.threads must be >= 1");
  c.training.variant = variant_kind_from_string(get_string(t, "variant", "training"));

  const auto& v = d["verify"];
  c.verify.samples = positive_count(v, "samples", "verify");
  c.verify.fd_step = get_number(v, "fd_step", "verify");
  if (!(c.verify.fd_step > 0.0 && c.verify.fd_step < 0.5)) {
    throw ConfigError("verify.fd_step must lie in (0, 0.5)");
  }
  c.verify.cross_tolerance = get_number(v, "cross_tolerance", "verify");
  c.verify.alignment_samples = positive_count(v, "alignment_samples", "verify");
  c.verify.alignment_tolerance = get_number(v, "alignment_tolerance", "verify");
  c.verify.state_tolerance = get_number(v, "state_tolerance", "verify");
  c.verify.gradcheck_points = positive_count(v, "gradcheck_points", "verify");
  c.verify.gradcheck_tolerance = get_number(v, "gradcheck_tolerance", "verify");
  c.verify.best_response_models = positive_count(v, "best_response_models", "verify");
  if (!v["planted_coupling"].is_null()) {
    const auto& pc = v["planted_coupling"];
    require_keys(pc, {"player", "partner", "strength"}, "verify.planted_coupling");
    PlantedCoupling planted;
    const int player = get_int(pc, "player", "verify.planted_coupling");
    const int partner = get_int(pc, "partner", "verify.planted_coupling");
    const auto n = static_cast<int>(c.plant.player_count());
    if (player < 0 || partner < 0 || player >= n || partner >= n || player == partner) {
      throw ConfigError("verify.planted_coupling needs two distinct valid player indices");
    }
    planted.player = static_cast<std::size_t>(player);
    planted.partner = static_cast<std::size_t>(partner);
    planted.strength = get_number(pc, "strength", "verify.planted_coupling");
    c.verify.planted = planted;
  }
  return c;
}

nlohmann::json load_config_document(const std::filesystem::path& path,
                                    const std::vector<std::string>& overrides) {
  nlohmann::json doc = default_config_document();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    nlohmann::json user = nlohmann::json::parse(in, nullptr, false, true);
    if (user.is_discarded()) throw ConfigError("config file '" + path.string() + "' is not JSON");
    merge_strict(doc, user);
  }
  apply_assignments(doc, overrides);
  return doc;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  return parse_config(load_config_document(path, overrides));
}

GameVariant ExperimentConfig::variant_for(std::size_t player, VariantKind kind) const {
  const PlayerSetup& p = players.at(player);
  switch (kind) {
    case VariantKind::sbpg: return p.sbpg;
    case VariantKind::ds2: return p.ds2;
    case VariantKind::stack: return p.stack;
  }
  throw ConfigError("unknown variant");
}

const learn::LearnerConfig& ExperimentConfig::learner_for(VariantKind kind) const {
  return kind == VariantKind::stack ? stack_learner : ds2_learner;
}

std::string config_hash(const nlohmann::json& document) {
  const std::string text = document.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sbpg
