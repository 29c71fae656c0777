#pragma once

#include <random>

namespace sbpg::learn {

using Rng = std::mt19937_64;

struct OuParams {
  bool enabled = false;
  double theta = 0.15;
  double sigma = 0.2;
  double mu = 0.0;
  double dt = 1.0;
};

/// Ornstein-Uhlenbeck process x += theta (mu - x) dt + sigma sqrt(dt) N(0,1).
/// Disabled noise returns exactly 0 and draws nothing from the generator.
class OuNoise {
 public:
  OuNoise() = default;
  explicit OuNoise(OuParams params) : params_(params), state_(params.mu) {}

  double sample(Rng& rng);
  void reset() { state_ = params_.mu; }
  double state() const { return state_; }
  const OuParams& params() const { return params_; }

 private:
  OuParams params_;
  double state_ = 0.0;
};

}  // namespace sbpg::learn
