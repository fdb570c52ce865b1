#pragma once

// Helpers shared by the two index builders.

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrk/cutting.hpp"
#include "rrk/index_types.hpp"
#include "rrk/range_tree.hpp"

namespace rrk::detail {

inline std::uint64_t ipow(std::uint64_t b, std::uint32_t e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

inline Point3 domain_bound(std::size_t n) {
  const auto c = static_cast<Coord>(n);
  return {c, c, c};
}

/// Checks that every axis is a permutation of 1..n and returns the points
/// sorted by w.
inline std::vector<Point4> leaf_order(std::span<const Point4> points) {
  const std::size_t n = points.size();
  std::vector<Point4> leaves(n);
  std::vector<std::uint8_t> seen(4 * n, 0);
  for (const Point4& p : points) {
    const Coord c[4] = {p.x, p.y, p.z, p.w};
    for (int a = 0; a < 4; ++a) {
      if (c[a] < 1 || static_cast<std::size_t>(c[a]) > n || seen[a * n + c[a] - 1]) {
        throw std::invalid_argument("points are not in rank space: axis " + std::to_string(a) + " of id " +
                                    std::to_string(p.id) + " is not a distinct value in [1, n]");
      }
      seen[a * n + c[a] - 1] = 1;
    }
    leaves[p.w - 1] = p;
  }
  return leaves;
}

inline std::vector<Point3> project(const std::vector<Point4>& leaves, std::span<const std::uint32_t> gids) {
  std::vector<Point3> out(gids.size());
  for (std::size_t i = 0; i < gids.size(); ++i) out[i] = leaves[gids[i]].xyz();
  return out;
}

/// Appends the cells of `cut` (built over the points named by `gids`) and
/// their members' leaf indices. Returns the index of the first new cell.
inline std::uint32_t add_cells(const Cutting& cut, std::span<const std::uint32_t> gids, std::uint32_t node,
                               std::vector<CellRec>& cells, std::vector<std::uint32_t>& gid) {
  const auto first = static_cast<std::uint32_t>(cells.size());
  for (const Cell& c : cut.cells) {
    cells.push_back({c.apex, node, static_cast<std::uint32_t>(gid.size()), static_cast<std::uint32_t>(c.size())});
    for (std::uint32_t m : c.members) gid.push_back(gids[m]);
  }
  return first;
}

/// Slot of leaf g among the x-ordered members of `cell`.
inline std::uint32_t rank_in(const std::vector<std::uint32_t>& gid, const CellRec& cell,
                             const std::vector<Point4>& leaves, std::uint32_t g) {
  const auto* b = gid.data() + cell.begin;
  const auto* e = b + cell.size;
  const auto* it = std::lower_bound(b, e, leaves[g].x, [&](std::uint32_t m, Coord x) { return leaves[m].x < x; });
  if (it == e || *it != g) {
    throw std::logic_error("leaf " + std::to_string(g) + " is not a member of the cell at node " +
                           std::to_string(cell.node));
  }
  return static_cast<std::uint32_t>(it - b);
}

/// Brute-force cell membership for audits: S(u) of every internal node
/// sorted by x.
class TruthOracle {
 public:
  TruthOracle(const RangeTree& tree, const std::vector<Point4>& leaves) : leaves_(leaves) {
    sets_.resize(tree.nodes().size());
    for (std::uint32_t id = 0; id < tree.nodes().size(); ++id) {
      const auto& nd = tree.node(id);
      if (nd.leaf()) continue;
      auto& s = sets_[id];
      for (std::uint32_t g = nd.lo; g < nd.hi; ++g) s.push_back(g);
      std::sort(s.begin(), s.end(), [&](std::uint32_t a, std::uint32_t b) { return leaves[a].x < leaves[b].x; });
    }
  }

  /// Leaves of S(u) dominated by apex, by increasing x.
  std::vector<std::uint32_t> members(std::uint32_t u, const Point3& apex) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t g : sets_[u]) {
      const Point4& p = leaves_[g];
      if (p.x > apex.x) break;
      if (p.y <= apex.y && p.z <= apex.z) out.push_back(g);
    }
    return out;
  }

  const std::vector<std::uint32_t>& set(std::uint32_t u) const { return sets_[u]; }

 private:
  const std::vector<Point4>& leaves_;
  std::vector<std::vector<std::uint32_t>> sets_;
};

}  // namespace rrk::detail
