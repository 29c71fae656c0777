#include "sbpg/learn/sample_buffer.hpp"

#include <stdexcept>

namespace sbpg::learn {

SampleRing::SampleRing(std::size_t capacity) : data_(capacity) {
  if (capacity == 0) throw std::invalid_argument("sample ring capacity must be >= 1");
}

void SampleRing::push(const Sample& sample) {
  data_[head_] = sample;
  head_ = (head_ + 1) % data_.size();
  if (size_ < data_.size()) ++size_;
}

std::vector<Sample> SampleRing::samples() const {
  std::vector<Sample> out;
  out.reserve(size_);
  const std::size_t start = (head_ + data_.size() - size_) % data_.size();
  for (std::size_t i = 0; i < size_; ++i) out.push_back(data_[(start + i) % data_.size()]);
  return out;
}

SampleBuffer::SampleBuffer(std::size_t cells, std::size_t capacity)
    : rings_(cells, SampleRing(capacity)) {}

}  // namespace sbpg::learn
