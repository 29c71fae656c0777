#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sbpg {

/// Elementary utility signals produced by the plant for one player.
enum class ObjectiveKind {
  bottleneck_overflow_prev,  // 1 / (1 + V_p)
  bottleneck_overflow_next,  // 1 / (1 + V_s)
  power,                     // 1 / (1 + P)
  demand,                    // 1 / (1 - V_D)
  custom,
};

std::string to_string(ObjectiveKind kind);
ObjectiveKind objective_kind_from_string(const std::string& name);

/// Values of every elementary signal for one player over one window.
struct TermValues {
  double prev = 0.0;
  double next = 0.0;
  double power = 0.0;
  double demand = 0.0;
  double custom = 0.0;

  double get(ObjectiveKind kind) const;
};

/// A player objective is a named sum of elementary signals. Most objectives
/// hold one term; a composite such as "bottleneck_overflow" holds two.
struct ObjectiveSpec {
  std::string id;
  std::vector<ObjectiveKind> terms;

  double evaluate(const TermValues& values) const;
};

/// Priority order over a player's objectives, given as indices into the
/// player's objective list.
class ObjectiveHierarchy {
 public:
  ObjectiveHierarchy() = default;
  /// Throws ConfigError unless `order` is a permutation of 0..k-1 with k >= 2.
  explicit ObjectiveHierarchy(std::vector<std::size_t> order);

  const std::vector<std::size_t>& order() const { return order_; }
  std::size_t size() const { return order_.size(); }
  std::size_t game_count() const { return order_.size() - 1; }

 private:
  std::vector<std::size_t> order_;
};

struct VanillaVariant {
  /// One weight per objective of the player.
  std::vector<double> weights;
};

struct Ds2Variant {
  std::vector<std::size_t> leader;
  std::vector<std::size_t> follower;
  double beta = 0.65;
  std::optional<double> theta;
};

struct StackVariant {
  ObjectiveHierarchy hierarchy;
  /// beta per stacked game z = 1..k-1
  std::vector<double> beta;
  std::vector<std::optional<double>> theta;
};

using GameVariant = std::variant<VanillaVariant, Ds2Variant, StackVariant>;

/// Throws ConfigError when the variant is inconsistent with an objective
/// list of size `objective_count`.
void validate_variant(const GameVariant& variant, std::size_t objective_count);

/// Ordered objective groups ("tiers") with per-game trade-off parameters.
/// DS2 is the two-tier case; a stack of k objectives has k singleton tiers.
struct TierPlan {
  std::vector<std::vector<std::size_t>> tiers;
  std::vector<double> beta;
  std::vector<std::optional<double>> theta;

  std::size_t game_count() const { return tiers.size() - 1; }
};

TierPlan tier_plan(const Ds2Variant& variant);
TierPlan tier_plan(const StackVariant& variant);

/// Leader and follower utilities of stacked game `game` (0-based) given the
/// per-objective utilities of the player.
struct RoleUtilities {
  double leader = 0.0;
  double follower = 0.0;
  bool gated = false;
};

RoleUtilities role_utilities(const TierPlan& plan, std::size_t game,
                             const std::vector<double>& objective_utilities);

double weighted_utility(const VanillaVariant& variant,
                        const std::vector<double>& objective_utilities);

}  // namespace sbpg
