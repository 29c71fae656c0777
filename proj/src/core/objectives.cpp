#include "sbpg/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sbpg/error.hpp"

namespace sbpg {

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::bottleneck_overflow_prev: return "bottleneck_overflow_prev";
    case ObjectiveKind::bottleneck_overflow_next: return "bottleneck_overflow_next";
    case ObjectiveKind::power: return "power";
    case ObjectiveKind::demand: return "demand";
    case ObjectiveKind::custom: return "custom";
  }
  return "?";
}

ObjectiveKind objective_kind_from_string(const std::string& name) {
  for (auto k : {ObjectiveKind::bottleneck_overflow_prev, ObjectiveKind::bottleneck_overflow_next,
                 ObjectiveKind::power, ObjectiveKind::demand, ObjectiveKind::custom}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown objective kind '" + name + "'");
}

double TermValues::get(ObjectiveKind kind) const {
  switch (kind) {
    case ObjectiveKind::bottleneck_overflow_prev: return prev;
    case ObjectiveKind::bottleneck_overflow_next: return next;
    case ObjectiveKind::power: return power;
    case ObjectiveKind::demand: return demand;
    case ObjectiveKind::custom: return custom;
  }
  return 0.0;
}

double ObjectiveSpec::evaluate(const TermValues& values) const {
  double sum = 0.0;
  for (auto t : terms) sum += values.get(t);
  return sum;
}

ObjectiveHierarchy::ObjectiveHierarchy(std::vector<std::size_t> order) : order_(std::move(order)) {
  if (order_.size() < 2) throw ConfigError("objective hierarchy needs at least two objectives");
  std::vector<std::size_t> sorted = order_;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != i) throw ConfigError("objective hierarchy is not a permutation");
  }
}

namespace {

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("trade-off beta outside [0, 1]");
}

void check_indices(const std::vector<std::size_t>& idx, std::size_t count, const char* what) {
  if (idx.empty()) throw ConfigError(std::string(what) + " objective set is empty");
  for (auto i : idx) {
    if (i >= count) throw ConfigError(std::string(what) + " objective index out of range");
  }
}

}  // namespace

void validate_variant(const GameVariant& variant, std::size_t objective_count) {
  if (objective_count == 0) throw ConfigError("player has no objectives");
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, VanillaVariant>) {
          if (v.weights.size() != objective_count) throw ConfigError("one weight per objective required");
          for (double w : v.weights) {
            if (!std::isfinite(w) || w < 0.0) throw ConfigError("vanilla weights must be finite and >= 0");
          }
        } else if constexpr (std::is_same_v<T, Ds2Variant>) {
          check_indices(v.leader, objective_count, "leader");
          check_indices(v.follower, objective_count, "follower");
          for (auto l : v.leader) {
            if (std::find(v.follower.begin(), v.follower.end(), l) != v.follower.end()) {
              throw ConfigError("objective assigned to both leader and follower");
            }
          }
          check_beta(v.beta);
        } else {
          if (v.hierarchy.size() != objective_count) {
            throw ConfigError("hierarchy must order every objective exactly once");
          }
          if (v.beta.size() != v.hierarchy.game_count()) throw ConfigError("one beta per stacked game required");
          for (double b : v.beta) check_beta(b);
          if (!v.theta.empty() && v.theta.size() != v.hierarchy.game_count()) {
            throw ConfigError("theta must be empty or one per stacked game");
          }
        }
      },
      variant);
}

TierPlan tier_plan(const Ds2Variant& variant) {
  TierPlan plan;
  plan.tiers = {variant.leader, variant.follower};
  plan.beta = {variant.beta};
  plan.theta = {variant.theta};
  return plan;
}

TierPlan tier_plan(const StackVariant& variant) {
  TierPlan plan;
  for (auto idx : variant.hierarchy.order()) plan.tiers.push_back({idx});
  plan.beta = variant.beta;
  plan.theta = variant.theta;
  plan.theta.resize(plan.beta.size());
  return plan;
}

RoleUtilities role_utilities(const TierPlan& plan, std::size_t game,
                             const std::vector<double>& objective_utilities) {
  auto tier_sum = [&](std::size_t t) {
    double s = 0.0;
    for (auto idx : plan.tiers[t]) s += objective_utilities.at(idx);
    return s;
  };
  RoleUtilities out;
  for (std::size_t q = 0; q <= game; ++q) out.leader += tier_sum(q);
  const double beta = plan.beta.at(game);
  out.follower = beta * out.leader + (1.0 - beta) * tier_sum(game + 1);
  const auto& theta = plan.theta.at(game);
  if (theta && out.leader < *theta) {
    out.follower = 0.0;
    out.gated = true;
  }
  return out;
}

double weighted_utility(const VanillaVariant& variant,
                        const std::vector<double>& objective_utilities) {
  double sum = 0.0;
  for (std::size_t i = 0; i < variant.weights.size(); ++i) {
    sum += variant.weights[i] * objective_utilities.at(i);
  }
  return sum;
}

}  // namespace sbpg
