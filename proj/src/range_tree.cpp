#include "rrk/range_tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace rrk {

RangeTree::RangeTree(std::size_t n, std::size_t rho) : n_(n), rho_(rho) {
  if (rho < 2) throw std::invalid_argument("RangeTree: rho must be >= 2");
  if (n == 0) return;
  nodes_.push_back(Node{kNone, kNone, 0, 0, 0, static_cast<std::uint32_t>(n)});
  leaf_node_.assign(n, kNone);
  for (std::uint32_t id = 0; id < nodes_.size(); ++id) {
    const Node cur = nodes_[id];
    height_ = std::max(height_, cur.depth);
    const std::uint32_t m = cur.size();
    if (m == 1) {
      leaf_node_[cur.lo] = id;
      continue;
    }
    const auto k = static_cast<std::uint32_t>(std::min<std::size_t>(rho, m));
    nodes_[id].first_child = static_cast<std::uint32_t>(nodes_.size());
    nodes_[id].children = k;
    std::uint32_t lo = cur.lo;
    for (std::uint32_t c = 0; c < k; ++c) {
      const std::uint32_t len = m / k + (c < m % k ? 1 : 0);
      nodes_.push_back(Node{id, kNone, 0, cur.depth + 1, lo, lo + len});
      lo += len;
    }
  }
}

std::uint32_t RangeTree::child_slot(std::uint32_t id, std::uint32_t leaf) const {
  const Node& nd = nodes_[id];
  const std::uint32_t m = nd.size(), k = nd.children;
  const std::uint32_t off = leaf - nd.lo;
  // the first m % k children have one extra leaf
  const std::uint32_t big = m / k + 1, extra = m % k;
  if (off < big * extra) return off / big;
  return extra + (off - big * extra) / (m / k);
}

std::uint32_t RangeTree::descendant_at(std::uint32_t id, std::uint32_t leaf, std::uint32_t depth) const {
  while (!nodes_[id].leaf() && nodes_[id].depth < depth) id = child_of(id, leaf);
  return id;
}

// One side of the query: the path from the root towards the boundary leaf.
// A boundary outside [0, n) is a virtual leaf left of everything (slot -1)
// or right of everything (slot = children), so its path stops at the root.
struct RangeTree::Boundary {
  std::vector<std::uint32_t> path;  // nodes from the root
  std::vector<std::int64_t> slot;   // child slot taken below path[i]
};

template <typename Emit>
void RangeTree::decompose(Coord wlo, Coord whi, Emit&& emit) const {
  if (n_ == 0) return;
  wlo = std::max<Coord>(wlo, 1);
  whi = std::min<Coord>(whi, static_cast<Coord>(n_));
  if (wlo > whi || nodes_[0].leaf()) return;
  // boundary leaves: l_a holds w-rank wlo-1, l_b holds whi+1 (leaf index = rank-1)
  const std::int64_t la = static_cast<std::int64_t>(wlo) - 2;
  const std::int64_t lb = static_cast<std::int64_t>(whi);

  auto walk = [&](std::int64_t leaf) {
    Boundary b;
    std::uint32_t id = 0;
    b.path.push_back(id);
    while (!nodes_[id].leaf()) {
      if (leaf < 0) {
        b.slot.push_back(-1);
        break;
      }
      if (leaf >= static_cast<std::int64_t>(n_)) {
        b.slot.push_back(nodes_[id].children);
        break;
      }
      const std::uint32_t s = child_slot(id, static_cast<std::uint32_t>(leaf));
      b.slot.push_back(s);
      id = nodes_[id].first_child + s;
      b.path.push_back(id);
    }
    return b;
  };
  const Boundary a = walk(la), b = walk(lb);

  // v_ab: the deepest node on both paths
  std::size_t v = 0;
  while (v + 1 < a.path.size() && v + 1 < b.path.size() && a.path[v + 1] == b.path[v + 1]) ++v;
  const std::uint32_t vab = a.path[v];

  // children of v_ab strictly between the two paths
  {
    const std::int64_t from = a.slot[v] + 1, to = b.slot[v] - 1;
    if (from <= to) emit(vab, static_cast<std::uint32_t>(from), static_cast<std::uint32_t>(to));
  }
  // right siblings of a's path below v_ab, left siblings of b's path
  for (std::size_t i = v + 1; i < a.slot.size(); ++i) {
    const std::uint32_t u = a.path[i];
    const std::int64_t from = a.slot[i] + 1, to = static_cast<std::int64_t>(nodes_[u].children) - 1;
    if (from <= to) emit(u, static_cast<std::uint32_t>(from), static_cast<std::uint32_t>(to));
  }
  for (std::size_t i = v + 1; i < b.slot.size(); ++i) {
    const std::uint32_t u = b.path[i];
    const std::int64_t to = b.slot[i] - 1;
    if (to >= 0) emit(u, 0u, static_cast<std::uint32_t>(to));
  }
}

std::vector<std::uint32_t> RangeTree::canonical_nodes(Coord wlo, Coord whi) const {
  std::vector<std::uint32_t> out;
  decompose(wlo, whi, [&](std::uint32_t u, std::uint32_t l, std::uint32_t r) {
    for (std::uint32_t s = l; s <= r; ++s) out.push_back(nodes_[u].first_child + s);
  });
  if (n_ == 1 && wlo <= 1 && whi >= 1) out.push_back(0);
  return out;
}

std::vector<RangeTree::Unit> RangeTree::canonical_pairs(Coord wlo, Coord whi) const {
  std::vector<Unit> out;
  decompose(wlo, whi, [&](std::uint32_t u, std::uint32_t l, std::uint32_t r) { out.push_back({u, l, r}); });
  // a lone leaf root stands for itself
  if (n_ == 1 && wlo <= 1 && whi >= 1) out.push_back({0, 0, 0});
  return out;
}

}  // namespace rrk
