#include "sbpg/maps/support_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbpg::maps {

SupportGrid::SupportGrid(std::size_t dims, std::size_t points_per_dim, std::vector<Bounds> bounds)
    : points_(points_per_dim), bounds_(std::move(bounds)) {
  if (dims == 0) throw std::invalid_argument("support grid needs at least one dimension");
  if (points_ < 2) throw std::invalid_argument("support grid needs at least two points per axis");
  if (bounds_.size() != dims) throw std::invalid_argument("one bound per dimension required");
  for (const auto& b : bounds_) {
    if (!(b.hi > b.lo)) throw std::invalid_argument("empty grid bound");
  }
  cell_count_ = 1;
  for (std::size_t d = 0; d < dims; ++d) cell_count_ *= points_;
}

SupportGrid::SupportGrid(std::size_t dims, std::size_t points_per_dim)
    : SupportGrid(dims, points_per_dim, std::vector<Bounds>(dims, Bounds{0.0, 1.0})) {}

double SupportGrid::spacing(std::size_t axis) const {
  const auto& b = bounds_.at(axis);
  return (b.hi - b.lo) / static_cast<double>(points_ - 1);
}

double SupportGrid::coordinate(std::size_t axis, std::size_t index) const {
  if (index + 1 == points_) return bounds_.at(axis).hi;
  return bounds_.at(axis).lo + static_cast<double>(index) * spacing(axis);
}

std::vector<std::size_t> SupportGrid::unflatten(std::size_t cell) const {
  std::vector<std::size_t> idx(dims());
  for (std::size_t d = dims(); d-- > 0;) {
    idx[d] = cell % points_;
    cell /= points_;
  }
  return idx;
}

std::size_t SupportGrid::flatten(std::span<const std::size_t> index) const {
  std::size_t cell = 0;
  for (std::size_t d = 0; d < dims(); ++d) cell = cell * points_ + index[d];
  return cell;
}

StateVector SupportGrid::support_vector(std::size_t cell) const {
  const auto idx = unflatten(cell);
  StateVector s(dims());
  for (std::size_t d = 0; d < dims(); ++d) s[d] = coordinate(d, idx[d]);
  return s;
}

std::size_t SupportGrid::nearest_cell(std::span<const double> s0) const {
  if (s0.size() != dims()) throw std::invalid_argument("state dimension mismatch");
  std::size_t cell = 0;
  for (std::size_t d = 0; d < dims(); ++d) {
    const double t = (s0[d] - bounds_[d].lo) / spacing(d);
    // ceil(t - 1/2) rounds half-way points down.
    double r = std::ceil(t - 0.5);
    r = std::clamp(r, 0.0, static_cast<double>(points_ - 1));
    cell = cell * points_ + static_cast<std::size_t>(r);
  }
  return cell;
}

bool operator==(const SupportGrid& a, const SupportGrid& b) {
  if (a.points_ != b.points_ || a.bounds_.size() != b.bounds_.size()) return false;
  for (std::size_t i = 0; i < a.bounds_.size(); ++i) {
    if (a.bounds_[i].lo != b.bounds_[i].lo || a.bounds_[i].hi != b.bounds_[i].hi) return false;
  }
  return true;
}

}  // namespace sbpg::maps
