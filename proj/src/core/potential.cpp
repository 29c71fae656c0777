#include "sbpg/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace sbpg {

double potential_value(std::span<const double> utilities) {
  double sum = 0.0;
  for (double u : utilities) {
    if (!std::isfinite(u)) throw std::invalid_argument("non-finite player utility");
    sum += u;
  }
  return sum;
}

}  // namespace sbpg
