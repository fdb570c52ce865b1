#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rrk/cell_predecessor.hpp"
#include "rrk/cutting.hpp"
#include "rrk/geom.hpp"
#include "rrk/index_types.hpp"
#include "rrk/range_tree.hpp"
#include "rrk/small_dom.hpp"
#include "rrk/stats.hpp"

namespace rrk {

struct FastConfig {
  std::size_t rho = 0;  // 0 picks 4
  std::size_t t0 = 0;   // 0 picks max(4, ceil(log2(n)^2))
  SmallDomConfig small;
  /// Fence spacing of the per-cell predecessor structures; 0 picks
  /// bits_for(n + 1).
  std::uint32_t fence_step = 0;

  static constexpr std::size_t kDefaultRho = 4;
  static std::size_t default_t0(std::size_t n);
};

/// Range tree on w in which every run of consecutive children (l..r) of a
/// node keeps its own t0-cutting, so a w-interval splits into O(height)
/// runs instead of O(rho * height) nodes.
///
/// A node of depth d is a c-node for the largest c <= max_class with rho^c
/// dividing d (the root takes max_class). Each run of a c-node has an
/// overlay cutting with parameter 4 t_{c+1}, t_c = rho^c t0, and each
/// overlay cell an inner cutting with parameter 2 t_{c+1}. An inner cell
/// sends its points to the descendant at the next depth that is a multiple
/// of rho^(c+1), into that node's overlay for its full run of children.
/// Decoding climbs one class per hop:
///
///   C(u,l,r) cell -> overlay cell of (u,l,r) -> inner cell -> overlay cell of v -> ... -> leaf
///
/// Nodes with at most t_{c+1} points keep no overlay; their cells and the
/// inner cells that reach them point at leaves directly.
class FastIndex {
 public:
  FastIndex() = default;

  /// Same input contract as LinearIndex::build.
  static FastIndex build(std::span<const Point4> points, const FastConfig& cfg = {});

  std::size_t size() const { return leaves_.size(); }
  std::size_t rho() const { return rho_; }
  std::size_t t0() const { return t0_; }
  std::uint32_t max_class() const { return max_class_; }
  std::uint32_t height() const { return tree_.height(); }
  const RangeTree& tree() const { return tree_; }
  const std::vector<Point4>& leaves() const { return leaves_; }
  std::uint32_t node_class(std::uint32_t node) const { return nodes_[node].cls; }
  bool has_overlay(std::uint32_t node) const { return !nodes_[node].lazy; }

  /// ln(rho) / ln(log2 n): the exponent with rho = log^eps n.
  double epsilon() const;
  /// ceil(1/eps) + 1 with 1/eps = max(0, log_rho log2 n).
  std::size_t hop_bound() const;

  void report(const Query5& q, std::vector<Point4>& out, QueryStats* stats = nullptr) const;
  std::vector<PointId> query(const Query5& q, QueryStats* stats = nullptr) const;
  bool any(const Query5& q, QueryStats* stats = nullptr) const;

  std::vector<RangeTree::Unit> canonical_pairs(Coord wlo, Coord whi) const {
    return tree_.canonical_pairs(wlo, whi);
  }

  /// Decodes member `ref.rank` of C cell `ref.cell`.
  Point4 decode(const PointRef& ref, std::size_t* hops = nullptr) const;
  DominanceBox3 translate_query_to_cell(std::uint32_t cell, const DominanceBox3& q, QueryStats* stats = nullptr) const;

  std::size_t c_cells() const { return c_cells_.size(); }
  const CellRec& c_cell(std::uint32_t i) const { return c_cells_[i]; }
  /// Apexes of the t0-cutting of the run (l..r) of `node`.
  std::vector<Point3> pair_apexes(std::uint32_t node, std::uint32_t l, std::uint32_t r) const;
  /// Leaf indices of the points of run (l..r), in leaf order.
  std::pair<std::uint32_t, std::uint32_t> pair_leaves(std::uint32_t node, std::uint32_t l, std::uint32_t r) const;
  const CellPredecessor& predecessor(std::uint32_t cell, int axis) const { return c_pred_[3 * cell + axis]; }

  AuditReport audit() const;
  const SpaceReport& space() const { return space_; }

  template <class Archive>
  void serialize(Archive& ar) {
    ar(rho_, t0_, max_class_, fence_step_, tree_, leaves_, nodes_, pairs_, c_locators_, c_cells_, c_pair_, c_cont_,
       c_slot_, c_yord_, c_zord_, c_dom_, c_pred_, o_cells_, o_ecell_, o_eslot_, e_cells_, e_pair_, e_target_, e_slot_,
       e_tbegin_, e_targets_, space_);
  }

 private:
  struct NodeRec {
    std::uint32_t pair_begin = 0;  // runs of this node in pairs_, (0,0), (0,1), ..., (1,1), ...
    std::uint32_t cls = 0;
    bool lazy = true;

    template <class Archive>
    void serialize(Archive& ar) {
      ar(pair_begin, cls, lazy);
    }
  };

  struct PairRec {
    std::uint32_t node = 0;
    std::uint32_t l = 0, r = 0;
    std::uint32_t c_begin = 0, c_count = 0;
    std::uint32_t o_begin = 0, o_count = 0;

    template <class Archive>
    void serialize(Archive& ar) {
      ar(node, l, r, c_begin, c_count, o_begin, o_count);
    }
  };

  struct Target {
    std::uint32_t node = 0;
    std::uint32_t cell = kNoIndex;  // overlay cell of `node`'s full run, or none for a leaf

    template <class Archive>
    void serialize(Archive& ar) {
      ar(node, cell);
    }
  };

  class Builder;
  friend class Builder;

  std::uint32_t pair_index(std::uint32_t node, std::uint32_t l, std::uint32_t r) const;
  void report_pair(std::uint32_t pair, const DominanceBox3& q, std::vector<Point4>& out, QueryStats& st) const;
  bool any_pair(std::uint32_t pair, const DominanceBox3& q, QueryStats& st) const;
  std::uint32_t leaf_of(std::uint32_t cell, std::uint32_t rank, std::size_t& hops) const;
  void account_space();

  std::size_t rho_ = 4;
  std::size_t t0_ = 4;
  std::uint32_t max_class_ = 0;
  std::uint32_t fence_step_ = 1;
  RangeTree tree_;
  std::vector<Point4> leaves_;
  std::vector<NodeRec> nodes_;
  std::vector<PairRec> pairs_;
  std::vector<ApexLocator> c_locators_;  // per run

  // C cells: overlay cell (or none), per member overlay rank or leaf index
  std::vector<CellRec> c_cells_;
  std::vector<std::uint32_t> c_pair_;
  std::vector<std::uint32_t> c_cont_;
  std::vector<std::uint32_t> c_slot_;
  std::vector<std::uint32_t> c_yord_;
  std::vector<std::uint32_t> c_zord_;
  std::vector<SmallDom> c_dom_;
  std::vector<CellPredecessor> c_pred_;  // x, y, z per cell

  std::vector<CellRec> o_cells_;
  std::vector<std::uint32_t> o_ecell_;
  std::vector<std::uint32_t> o_eslot_;
  std::vector<CellRec> e_cells_;
  std::vector<std::uint32_t> e_pair_;
  std::vector<std::uint32_t> e_target_;
  std::vector<std::uint32_t> e_slot_;
  std::vector<std::uint32_t> e_tbegin_;  // per inner cell plus an end sentinel
  std::vector<Target> e_targets_;

  SpaceReport space_;
};

}  // namespace rrk
