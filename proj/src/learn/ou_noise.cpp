#include "sbpg/learn/ou_noise.hpp"

#include <cmath>

namespace sbpg::learn {

double OuNoise::sample(Rng& rng) {
  if (!params_.enabled) return 0.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  const double z = normal(rng);
  state_ += params_.theta * (params_.mu - state_) * params_.dt +
            params_.sigma * std::sqrt(params_.dt) * z;
  return state_;
}

}  // namespace sbpg::learn
