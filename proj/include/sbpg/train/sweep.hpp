#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbpg/config.hpp"
#include "sbpg/train/trainer.hpp"

namespace sbpg::train {

/// One searched key: either a list of choices or a uniform range.
struct SweepDimension {
  std::string key;
  std::vector<nlohmann::json> choices;
  double min = 0.0;
  double max = 0.0;
  bool integer = false;
};

struct SearchSpace {
  std::vector<SweepDimension> dimensions;

  /// {"ds2.alpha": [0.2, 0.4], "ds2.beta": {"min": 0.5, "max": 0.9}}
  static SearchSpace from_json(const nlohmann::json& j);
};

struct SweepBudget {
  int trials = 8;
  int episodes = 3;
  double horizon = 2000.0;
  std::uint64_t seed = 1;
  int threads = 1;
  VariantKind variant = VariantKind::ds2;
};

struct SweepTrial {
  std::size_t index = 0;
  std::vector<std::string> assignments;
  EpisodeMetrics eval;  // trace dropped
  double score = 0.0;   // eval mean potential
};

/// Random search: draws `trials` assignments, trains each at the reduced
/// budget and ranks by eval potential (descending, ties by draw order).
/// Throws ConfigError for an empty space or trials < 1.
std::vector<SweepTrial> sweep(const nlohmann::json& base_document, const SearchSpace& space,
                              const SweepBudget& budget);

nlohmann::json sweep_report(const std::vector<SweepTrial>& ranked, const SweepBudget& budget);

}  // namespace sbpg::train
