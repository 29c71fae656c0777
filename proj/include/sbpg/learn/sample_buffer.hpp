#pragma once

#include <cstddef>
#include <vector>

#include "sbpg/learn/poly_model.hpp"

namespace sbpg::learn {

/// Fixed-capacity ring of the most recent samples; evicts the oldest.
class SampleRing {
 public:
  explicit SampleRing(std::size_t capacity = 32);

  void push(const Sample& sample);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return data_.size(); }
  /// Oldest first.
  std::vector<Sample> samples() const;

 private:
  std::vector<Sample> data_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

/// One ring per support cell.
class SampleBuffer {
 public:
  SampleBuffer() = default;
  SampleBuffer(std::size_t cells, std::size_t capacity);

  SampleRing& cell(std::size_t index) { return rings_.at(index); }
  const SampleRing& cell(std::size_t index) const { return rings_.at(index); }
  std::size_t cell_count() const { return rings_.size(); }

 private:
  std::vector<SampleRing> rings_;
};

}  // namespace sbpg::learn
