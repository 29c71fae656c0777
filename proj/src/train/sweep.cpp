#include "sbpg/train/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sbpg/error.hpp"
#include "sbpg/json_util.hpp"
#include "sbpg/train/metrics_io.hpp"

namespace sbpg::train {

SearchSpace SearchSpace::from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.empty()) throw ConfigError("sweep search space is empty");
  SearchSpace space;
  for (const auto& [key, value] : j.items()) {
    SweepDimension d;
    d.key = key;
    if (value.is_array()) {
      if (value.empty()) throw ConfigError("sweep key '" + key + "' has no choices");
      for (const auto& v : value) d.choices.push_back(v);
    } else if (value.is_object()) {
      require_keys(value, {"min", "max", "integer"}, "sweep." + key);
      d.min = get_number(value, "min", "sweep." + key);
      d.max = get_number(value, "max", "sweep." + key);
      d.integer = value.contains("integer") && get_bool(value, "integer", "sweep." + key);
      if (!(d.min <= d.max)) throw ConfigError("sweep key '" + key + "' has min > max");
    } else {
      throw ConfigError("sweep key '" + key + "' needs a choice list or a {min, max} range");
    }
    space.dimensions.push_back(std::move(d));
  }
  return space;
}

std::vector<SweepTrial> sweep(const nlohmann::json& base_document, const SearchSpace& space,
                              const SweepBudget& budget) {
  if (space.dimensions.empty()) throw ConfigError("sweep search space is empty");
  if (budget.trials < 1) throw ConfigError("sweep needs at least one trial");

  // Draws happen up front in trial order so the set is independent of
  // how trials are scheduled.
  std::mt19937_64 rng(budget.seed);
  std::vector<SweepTrial> trials(static_cast<std::size_t>(budget.trials));
  for (std::size_t t = 0; t < trials.size(); ++t) {
    trials[t].index = t;
    for (const SweepDimension& d : space.dimensions) {
      nlohmann::json value;
      if (!d.choices.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, d.choices.size() - 1);
        value = d.choices[pick(rng)];
      } else if (d.integer) {
        std::uniform_int_distribution<long long> pick(std::llround(std::ceil(d.min)),
                                                      std::llround(std::floor(d.max)));
        value = pick(rng);
      } else {
        std::uniform_real_distribution<double> pick(d.min, d.max);
        value = pick(rng);
      }
      trials[t].assignments.push_back(d.key + "=" + value.dump());
    }
  }

  // Validate every draw before spending compute.
  std::vector<ExperimentConfig> configs;
  for (const SweepTrial& t : trials) {
    nlohmann::json doc = base_document;
    apply_assignments(doc, t.assignments);
    configs.push_back(parse_config(doc));
  }

  parallel_for(trials.size(), budget.threads, [&](std::size_t t) {
    TrainingPlan plan = plan_from(configs[t]);
    plan.variant = budget.variant;
    plan.episodes = budget.episodes;
    plan.horizon = budget.horizon;
    plan.seed = budget.seed;
    plan.eval = true;
    plan.threads = 1;
    TrainingResult r = run_training(configs[t], plan);
    trials[t].eval = std::move(r.episodes.back());
    trials[t].eval.trace.clear();
    trials[t].score = trials[t].eval.mean_potential;
  });

  std::stable_sort(trials.begin(), trials.end(),
                   [](const SweepTrial& a, const SweepTrial& b) { return a.score > b.score; });
  return trials;
}

nlohmann::json sweep_report(const std::vector<SweepTrial>& ranked, const SweepBudget& budget) {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t rank = 0; rank < ranked.size(); ++rank) {
    const SweepTrial& t = ranked[rank];
    entries.push_back({{"rank", rank + 1},
                       {"trial", t.index},
                       {"assignments", t.assignments},
                       {"score", t.score},
                       {"eval", episode_summary(t.eval)}});
  }
  return {{"variant", to_string(budget.variant)},
          {"trials", budget.trials},
          {"episodes", budget.episodes},
          {"horizon", budget.horizon},
          {"seed", budget.seed},
          {"ranking", entries}};
}

}  // namespace sbpg::train
