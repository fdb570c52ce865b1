#pragma once

#include <cstdint>
#include <vector>

#include "rrk/geom.hpp"

namespace rrk {

/// Shape of a range tree over n leaves with fan-out rho. Leaf i holds the
/// point with w-rank i+1. Children of a node get near-equal leaf counts and
/// every internal node has at least two children. Node ids are in BFS
/// order, so the children of a node are consecutive ids.
class RangeTree {
 public:
  static constexpr std::uint32_t kNone = 0xffffffffu;

  struct Node {
    std::uint32_t parent = kNone;
    std::uint32_t first_child = kNone;
    std::uint32_t children = 0;  // 0 for a leaf
    std::uint32_t depth = 0;
    std::uint32_t lo = 0;  // leaves [lo, hi)
    std::uint32_t hi = 0;

    bool leaf() const { return children == 0; }
    std::uint32_t size() const { return hi - lo; }

    template <class Archive>
    void serialize(Archive& ar) {
      ar(parent, first_child, children, depth, lo, hi);
    }
  };

  /// A run of consecutive children l..r (0-based, inclusive) of `node`.
  struct Unit {
    std::uint32_t node;
    std::uint32_t l;
    std::uint32_t r;

    friend bool operator==(const Unit&, const Unit&) = default;
  };

  RangeTree() = default;
  RangeTree(std::size_t n, std::size_t rho);

  std::size_t leaves() const { return n_; }
  std::size_t rho() const { return rho_; }
  std::uint32_t root() const { return 0; }
  std::uint32_t height() const { return height_; }
  const Node& node(std::uint32_t id) const { return nodes_[id]; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::uint32_t leaf_node(std::uint32_t leaf) const { return leaf_node_[leaf]; }

  /// Index among its parent's children of the child of `id` holding `leaf`.
  std::uint32_t child_slot(std::uint32_t id, std::uint32_t leaf) const;
  std::uint32_t child_of(std::uint32_t id, std::uint32_t leaf) const {
    return nodes_[id].first_child + child_slot(id, leaf);
  }
  /// Ancestor of `leaf` at the given depth, or the leaf itself when it is
  /// shallower.
  std::uint32_t descendant_at(std::uint32_t id, std::uint32_t leaf, std::uint32_t depth) const;

  /// Canonical nodes for the w-rank range [wlo, whi]; their leaf ranges
  /// partition the range. Empty when the range holds no leaf.
  std::vector<std::uint32_t> canonical_nodes(Coord wlo, Coord whi) const;
  /// Canonical child runs for [wlo, whi]: at most 2*height+1 of them. When
  /// the tree is a single leaf the run is {root, 0, 0} and means the leaf.
  std::vector<Unit> canonical_pairs(Coord wlo, Coord whi) const;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(n_, rho_, height_, nodes_, leaf_node_);
  }

 private:
  struct Boundary;
  template <typename Emit>
  void decompose(Coord wlo, Coord whi, Emit&& emit) const;

  std::size_t n_ = 0;
  std::size_t rho_ = 2;
  std::uint32_t height_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> leaf_node_;
};

}  // namespace rrk
