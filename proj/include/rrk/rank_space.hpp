#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "rrk/geom.hpp"

namespace rrk {

/// Sorted per-axis keys for one dataset. Keys are ordered by (value, id), so
/// the k-th key (1-based) is the point that received rank k on that axis.
class RankDictionary {
 public:
  enum Axis : int { kX = 0, kY = 1, kZ = 2, kW = 3 };
  static constexpr int kAxes = 4;

  struct Key {
    double value;
    PointId id;

    template <class Archive>
    void serialize(Archive& ar) {
      ar(value, id);
    }
  };

  RankDictionary() = default;
  explicit RankDictionary(std::array<std::vector<Key>, kAxes> keys);

  std::size_t size() const { return keys_[0].size(); }
  const std::vector<Key>& keys(Axis axis) const { return keys_[axis]; }

  /// ra(v): number of keys with value <= v.
  Coord rank_upper(Axis axis, double value) const;
  /// ra(succ(v)): rank of the first key with value >= v, or n+1 if none.
  Coord rank_lower(Axis axis, double value) const;
  /// Original value of the key with the given rank (1-based).
  double value_of(Axis axis, Coord rank) const;

  /// Tie-break rule used when building: equal values are ordered by id.
  static constexpr const char* kTieBreak = "value,id";

  template <class Archive>
  void serialize(Archive& ar) {
    ar(keys_);
  }

 private:
  std::array<std::vector<Key>, kAxes> keys_;
};

struct RankReduction {
  std::vector<Point4> points;
  RankDictionary dictionary;
};

/// Replaces every coordinate by its rank on that axis. Ties are broken by id,
/// so rank-space coordinates are distinct per axis. Throws on empty input or
/// duplicate ids.
RankReduction rank_reduce(std::span<const RawPoint4> points);

/// Maps an original-value query into rank space. Upper bounds become
/// ra(bound); the w lower bound becomes ra(succ(wlo)), which is n+1 when no
/// successor exists. The answer set is unchanged by the mapping.
Query5 query_to_rank_space(const RawQuery5& q, const RankDictionary& dict);

/// Maps a rank-space point back to its original coordinates.
RawPoint4 point_from_rank_space(const Point4& p, const RankDictionary& dict);

inline bool is_empty_range(const Query5& q) {
  return q.wlo > q.whi || q.box.a <= 0 || q.box.b <= 0 || q.box.c <= 0;
}

}  // namespace rrk
