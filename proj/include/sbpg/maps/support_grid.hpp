#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sbpg::maps {

using StateVector = std::vector<double>;

struct Bounds {
  double lo = 0.0;
  double hi = 1.0;
};

/// Equidistant support vectors over an m-dimensional box, p points per axis.
/// Cells are numbered row-major with axis 0 varying slowest.
class SupportGrid {
 public:
  SupportGrid() = default;
  /// Throws std::invalid_argument if p < 2, dims == 0 or any bound is empty.
  SupportGrid(std::size_t dims, std::size_t points_per_dim, std::vector<Bounds> bounds);
  /// Unit box [0,1]^dims.
  SupportGrid(std::size_t dims, std::size_t points_per_dim);

  std::size_t dims() const { return bounds_.size(); }
  std::size_t points_per_dim() const { return points_; }
  const std::vector<Bounds>& bounds() const { return bounds_; }
  std::size_t cell_count() const { return cell_count_; }

  double spacing(std::size_t axis) const;
  double coordinate(std::size_t axis, std::size_t index) const;
  std::vector<std::size_t> unflatten(std::size_t cell) const;
  std::size_t flatten(std::span<const std::size_t> index) const;
  /// Location of a support vector.
  StateVector support_vector(std::size_t cell) const;

  /// Support vector nearest to `s0` in Euclidean distance; ties go to the
  /// lower index on each axis. Coordinates outside the box snap to the edge.
  std::size_t nearest_cell(std::span<const double> s0) const;

  friend bool operator==(const SupportGrid& a, const SupportGrid& b);

 private:
  std::size_t points_ = 0;
  std::vector<Bounds> bounds_;
  std::size_t cell_count_ = 0;
};

}  // namespace sbpg::maps
