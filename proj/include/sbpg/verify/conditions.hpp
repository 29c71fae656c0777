#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbpg/action.hpp"
#include "sbpg/config.hpp"
#include "sbpg/learn/ou_noise.hpp"

namespace sbpg::verify {

/// Role actions of one player.
struct RoleAction {
  double leader = 0.0;
  double follower = 0.0;
};

/// Reservoir (state component) observed by more than one player.
struct SharedState {
  std::size_t index = 0;  // position in the state vector
  std::vector<std::size_t> players;
  std::string name;
};

/// Utilities of one evaluation step as a function of a state snapshot and
/// the joint actions.
class UtilityModel {
 public:
  virtual ~UtilityModel() = default;

  virtual std::size_t player_count() const = 0;
  virtual std::vector<double> sample_state(learn::Rng& rng) const = 0;
  /// Per player, per objective.
  virtual std::vector<std::vector<double>> objective_utilities(
      std::span<const double> state, std::span<const ActionValue> actions) const = 0;
  /// Per player combined utility U_i.
  virtual std::vector<double> utilities(std::span<const double> state,
                                        std::span<const ActionValue> actions) const = 0;
  virtual std::vector<SharedState> shared_states() const { return {}; }
  /// Finite-difference step for state components at `index`.
  virtual double state_step(std::size_t index) const { (void)index; return 1e-4; }
  virtual CoalitionMode coalition() const { return CoalitionMode::additive; }
  virtual std::string player_name(std::size_t player) const { return std::to_string(player); }
};

/// Where the constraint indicators of the one-step window are read.
enum class IndicatorState {
  given,      // on the sampled fills: U_i(a_i, s)
  after_step  // on the fills the step ends on, as the plant does
};

/// One-step plant utilities: the plant is set to the given fills, stepped
/// once by dt with the actions held, and scored as a one-step window.
/// Power and demand come from the step. U_i uses the vanilla weighting.
class PlantUtilityModel final : public UtilityModel {
 public:
  explicit PlantUtilityModel(const ExperimentConfig& config,
                             IndicatorState indicators = IndicatorState::given);

  std::size_t player_count() const override;
  std::vector<double> sample_state(learn::Rng& rng) const override;
  std::vector<std::vector<double>> objective_utilities(
      std::span<const double> state, std::span<const ActionValue> actions) const override;
  std::vector<double> utilities(std::span<const double> state,
                                std::span<const ActionValue> actions) const override;
  std::vector<SharedState> shared_states() const override;
  double state_step(std::size_t index) const override;
  CoalitionMode coalition() const override { return coalition_; }
  std::string player_name(std::size_t player) const override;

 private:
  plant::PlantConfig plant_;
  std::vector<PlayerSetup> players_;
  CoalitionMode coalition_;
  IndicatorState indicators_;
};

/// Adds strength * a_partner to the first objective of `player`.
class CoupledUtilityModel final : public UtilityModel {
 public:
  CoupledUtilityModel(std::shared_ptr<const UtilityModel> base, PlantedCoupling coupling,
                      std::vector<double> first_weights);

  std::size_t player_count() const override { return base_->player_count(); }
  std::vector<double> sample_state(learn::Rng& rng) const override {
    return base_->sample_state(rng);
  }
  std::vector<std::vector<double>> objective_utilities(
      std::span<const double> state, std::span<const ActionValue> actions) const override;
  std::vector<double> utilities(std::span<const double> state,
                                std::span<const ActionValue> actions) const override;
  std::vector<SharedState> shared_states() const override { return base_->shared_states(); }
  double state_step(std::size_t index) const override { return base_->state_step(index); }
  CoalitionMode coalition() const override { return base_->coalition(); }
  std::string player_name(std::size_t player) const override {
    return base_->player_name(player);
  }

 private:
  std::shared_ptr<const UtilityModel> base_;
  PlantedCoupling coupling_;
  std::vector<double> weights_;  // vanilla weight of each player's first objective
};

/// Model the verify command checks for a config, including any planted
/// coupling it declares.
std::shared_ptr<const UtilityModel> make_utility_model(const ExperimentConfig& config);

struct Violation {
  std::size_t sample = 0;
  std::size_t player = 0;
  std::optional<std::size_t> partner;  // other player (or second sharer)
  std::string detail;                  // role / objective / state name
  double magnitude = 0.0;
};

/// Pass iff every sampled magnitude lies strictly below the tolerance, so a
/// zero tolerance always fails.
struct ConditionReport {
  std::string name;
  double tolerance = 0.0;
  std::size_t evaluated = 0;
  double max_value = 0.0;
  bool pass = true;
  std::vector<Violation> violations;

  nlohmann::json to_json() const;
};

struct SamplingOptions {
  std::size_t samples = 200;
  double fd_step = 1e-4;
  double tolerance = 1e-6;
  std::uint64_t seed = 1;
};

/// Central differences of every player's per-objective utility with respect
/// to every other player's leader and follower actions.
ConditionReport check_cross_partials(const UtilityModel& model, const SamplingOptions& options);

using PotentialFn = std::function<double(std::span<const double> utilities)>;

/// Random unilateral deviations a_i -> a'_i; residual
/// |(U_i(a') - U_i(a)) - (phi(a') - phi(a))|.
ConditionReport check_potential_alignment(const UtilityModel& model, const PotentialFn& potential,
                                          const SamplingOptions& options,
                                          bool include_zero_deviation = true);

/// Differences between the state partials of the players sharing a state.
ConditionReport check_state_partials(const UtilityModel& model, const SamplingOptions& options);

}  // namespace sbpg::verify
