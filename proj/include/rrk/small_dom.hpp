#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rrk/geom.hpp"

namespace rrk {

struct SmallDomConfig {
  /// Grid arity is round(sqrt(t_prime)); each grid level splits a set into
  /// that many columns and rows.
  std::size_t t_prime = 16;
  /// Sets of at most this many points are answered by a direct scan.
  std::size_t base_threshold = 8;

  std::size_t arity() const;
};

/// Work counters for one small-set query.
struct SmallDomCounters {
  std::size_t touched = 0;  // meta cells, list entries and base entries read
  std::size_t reported = 0;
};

/// 3D dominance reporting on a small set in its own rank space.
///
/// Each grid level splits the points into columns (by x) and rows (by y) of
/// equal size. A meta cell (i, j) keeps the smallest z in column i and row j
/// plus that intersection's points sorted by z. A query reads the meta cells
/// left of its column and below its row, then recurses into its own row
/// (restricted to earlier columns) and its own column.
class SmallDom {
 public:
  static constexpr std::size_t kMaxPoints = 65535;

  SmallDom() = default;
  /// `points` are in the set's rank space; reported values are indices into it.
  explicit SmallDom(std::span<const Point3> points, const SmallDomConfig& cfg = {});

  std::size_t size() const { return coords_.size(); }
  /// Number of grid levels on the deepest path (0 for a base case).
  std::size_t depth() const { return depth_; }

  /// Appends every index whose point is dominated by (q.a, q.b, q.c).
  void query(const DominanceBox3& q, std::vector<std::uint32_t>& out, SmallDomCounters* counters = nullptr) const;
  bool any(const DominanceBox3& q) const;

  /// Structural self-check of the invariants; on failure `why` is filled.
  bool audit(std::string* why = nullptr) const;

  /// Bits the structure needs when every field is packed to its range.
  std::uint64_t design_bits() const;
  std::uint64_t physical_bytes() const;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(xs_, ys_, zs_, coords_, nodes_, splits_, meta_z_, rect_min_, row_stair_, col_stair_, stairs_, meta_begin_, items_, children_, depth_, arity_, base_);
  }

 private:
  using Slot = std::uint16_t;
  static constexpr std::uint32_t kNone = 0xffffffffu;
  static constexpr Slot kEmptyZ = 0xffff;

  struct Node {
    std::uint32_t items_begin = 0;  // base: its points sorted by z; grid: the meta lists
    std::uint32_t items_end = 0;
    std::uint32_t split_begin = 0;  // ncols-1 x splits followed by nrows-1 y splits
    std::uint32_t meta_begin = 0;   // ncols * nrows meta cells, column major
    std::uint32_t child_begin = 0;  // ncols column children then nrows row children
    std::uint8_t ncols = 0;         // 0 for a base case
    std::uint8_t nrows = 0;

    template <class Archive>
    void serialize(Archive& ar) {
      ar(items_begin, items_end, split_begin, meta_begin, child_begin, ncols, nrows);
    }
  };

  struct Coords {
    Slot x, y, z;
    template <class Archive>
    void serialize(Archive& ar) {
      ar(x, y, z);
    }
  };

  std::uint32_t build(std::vector<Slot>& pts, std::uint32_t level);
  bool stair_hit(const std::uint32_t* range, Slot first, Slot c, bool use_y, SmallDomCounters& cnt) const;
  template <typename Emit>
  bool visit(std::uint32_t node, Slot a, Slot b, Slot c, Emit& emit, SmallDomCounters& cnt) const;

  // sorted input values, to map queries to internal ranks; empty when the
  // input is already a permutation of 1..m on that axis
  std::vector<Coord> xs_, ys_, zs_;
  std::vector<Coords> coords_;       // internal ranks, 1-based and distinct per axis
  std::vector<Node> nodes_;
  std::vector<Slot> splits_;
  std::vector<Slot> meta_z_;
  // Same indexing as meta_z_, for a query landing in cell (r, u):
  std::vector<Slot> rect_min_;  // min z over cells (i, j) with i < r, j < u
  // [begin, end) into stairs_ of the (y, z) staircase of cells (i, u), i < r,
  // and of the (x, z) staircase of cells (r, j), j < u. A staircase lists the
  // minimal points by increasing first coordinate.
  std::vector<std::uint32_t> row_stair_;
  std::vector<std::uint32_t> col_stair_;
  std::vector<Slot> stairs_;
  std::vector<std::uint32_t> meta_begin_;  // per meta cell: begin of its list, plus end sentinel per node
  std::vector<Slot> items_;
  std::vector<std::uint32_t> children_;
  std::uint32_t depth_ = 0;
  std::uint32_t arity_ = 4;
  std::uint32_t base_ = 16;
};

}  // namespace rrk
