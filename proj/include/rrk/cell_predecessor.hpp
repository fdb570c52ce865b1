#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "rrk/geom.hpp"

namespace rrk {

/// Predecessor search over one sorted coordinate list of a cell whose
/// values are not stored: every `step`-th value is kept as a fence and the
/// search inside one block reads values through a decode callback.
class CellPredecessor {
 public:
  CellPredecessor() = default;
  CellPredecessor(std::span<const Coord> sorted, std::uint32_t step)
      : size_(static_cast<std::uint32_t>(sorted.size())), step_(std::max<std::uint32_t>(step, 1)) {
    for (std::size_t i = step_ - 1; i < sorted.size(); i += step_) fences_.push_back(sorted[i]);
  }

  std::uint32_t size() const { return size_; }
  std::uint32_t step() const { return step_; }
  const std::vector<Coord>& fences() const { return fences_; }

  /// Number of values <= bound. `at(i)` returns the i-th smallest value.
  template <typename Access>
  std::uint32_t count_le(Coord bound, Access&& at) const {
    // fences f_0..f_{k-1} are <= bound, so blocks 0..k-1 are entirely below
    const auto k = static_cast<std::uint32_t>(std::upper_bound(fences_.begin(), fences_.end(), bound) - fences_.begin());
    std::uint32_t lo = k * step_;
    // the fence closing block k is > bound when it exists
    std::uint32_t hi = std::min(size_, k < fences_.size() ? (k + 1) * step_ - 1 : size_);
    while (lo < hi) {
      const std::uint32_t mid = lo + (hi - lo) / 2;
      if (at(mid) <= bound) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

  std::uint64_t physical_bytes() const { return sizeof(*this) + fences_.capacity() * sizeof(Coord); }

  template <class Archive>
  void serialize(Archive& ar) {
    ar(size_, step_, fences_);
  }

 private:
  std::uint32_t size_ = 0;
  std::uint32_t step_ = 1;
  std::vector<Coord> fences_;
};

/// Plain binary search over the decoded values, the reference for count_le.
template <typename Access>
std::uint32_t count_le_plain(std::uint32_t size, Coord bound, Access&& at) {
  std::uint32_t lo = 0, hi = size;
  while (lo < hi) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    if (at(mid) <= bound) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace rrk
