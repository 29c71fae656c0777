#pragma once

#include <span>

namespace sbpg {

/// Reported potential value: the sum of per-player combined utilities.
/// Throws std::invalid_argument if any utility is non-finite.
double potential_value(std::span<const double> utilities);

}  // namespace sbpg
