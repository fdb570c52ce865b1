#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rrk/cutting.hpp"
#include "rrk/geom.hpp"
#include "rrk/index_types.hpp"
#include "rrk/range_tree.hpp"
#include "rrk/small_dom.hpp"
#include "rrk/stats.hpp"

namespace rrk {

struct LinearConfig {
  std::size_t rho = 0;  // 0 picks default_rho(n)
  std::size_t t0 = 0;   // 0 picks default_t0(n)
  /// Highest depth class that gets an overlay; 0 disables overlays.
  std::uint32_t max_class = 2;
  SmallDomConfig small;

  /// max(2, ceil(log2(n)^(1/4)))
  static std::size_t default_rho(std::size_t n);
  /// max(4, ceil(log2(n)^2))
  static std::size_t default_t0(std::size_t n);
};

/// Range tree on w whose internal nodes hold shallow cuttings of their
/// (x, y, z) projections. Every point inside a t0-cutting cell is named by
/// its x-rank there and decoded by walking cell-to-cell down to its leaf:
///
///   C cell -> C' cell (cont, F_X) -> D cell -> child's C' cell (down, F'') -> ...
///
/// Nodes whose depth is a multiple of rho^c (c >= 1) also keep an overlay
/// cutting with parameter 4*rho^c*t0 whose inner cuttings point straight
/// to the descendants rho^c levels down, so decoding takes long jumps once
/// it reaches such a node.
class LinearIndex {
 public:
  LinearIndex() = default;

  /// `points` must be in rank space: w a permutation of 1..n, x, y, z in
  /// [1, n]. Throws std::invalid_argument otherwise and std::logic_error if
  /// a containment the construction relies on fails.
  static LinearIndex build(std::span<const Point4> points, const LinearConfig& cfg = {});

  std::size_t size() const { return leaves_.size(); }
  std::size_t rho() const { return rho_; }
  std::size_t t0() const { return t0_; }
  std::uint32_t max_class() const { return max_class_; }
  std::uint32_t height() const { return tree_.height(); }
  const RangeTree& tree() const { return tree_; }
  /// Points in leaf order (by w).
  const std::vector<Point4>& leaves() const { return leaves_; }
  std::uint32_t node_class(std::uint32_t node) const { return nodes_[node].cls; }

  /// Points inside q, in no particular order.
  void report(const Query5& q, std::vector<Point4>& out, QueryStats* stats = nullptr) const;
  /// Sorted ids of the points inside q.
  std::vector<PointId> query(const Query5& q, QueryStats* stats = nullptr) const;
  /// True iff some point lies inside q. Nothing is decoded.
  bool any(const Query5& q, QueryStats* stats = nullptr) const;

  std::vector<std::uint32_t> canonical_nodes(Coord wlo, Coord whi) const { return tree_.canonical_nodes(wlo, whi); }

  /// Follows the decode chain from `ref` to the leaf holding the point.
  /// With `use_overlay` false only C' and D cells are used.
  Point4 decode(const PointRef& ref, std::size_t* hops = nullptr, bool use_overlay = true) const;
  /// Largest hop count decode() may need from a C cell.
  std::size_t hop_bound() const;

  /// Maps q into the rank space of C cell `cell` by binary search over its
  /// members, decoding each probed member.
  DominanceBox3 translate_query_to_cell(std::uint32_t cell, const DominanceBox3& q, QueryStats* stats = nullptr) const;

  std::size_t c_cells() const { return c_cells_.size(); }
  const CellRec& c_cell(std::uint32_t i) const { return c_cells_[i]; }

  /// Containment maps, interesting-point coverage and exhaustive decoding
  /// of every C cell member, checked against brute-force recomputation.
  AuditReport audit() const;
  const SpaceReport& space() const { return space_; }

  template <class Archive>
  void serialize(Archive& ar) {
    ar(rho_, t0_, max_class_, tree_, leaves_, nodes_, c_locators_, c_cells_, c_cont_, c_fx_, c_yord_, c_zord_,
       c_dom_, p_cells_, p_dcell_, p_dslot_, p_over_, p_oslot_, d_cells_, d_child_, d_slot_, d_down_begin_,
       d_down_, o_cells_, o_ecell_, o_eslot_, e_cells_, e_target_, e_slot_, e_tbegin_, e_targets_, space_);
  }

 private:
  struct NodeRec {
    std::uint32_t c_begin = 0, c_count = 0;
    std::uint32_t p_begin = 0, p_count = 0;
    std::uint32_t o_begin = 0, o_count = 0;
    std::uint32_t cls = 0;
    std::uint32_t locator = kNoIndex;  // index into c_locators_

    template <class Archive>
    void serialize(Archive& ar) {
      ar(c_begin, c_count, p_begin, p_count, o_begin, o_count, cls, locator);
    }
  };

  struct Target {
    std::uint32_t node = 0;
    std::uint32_t cell = kNoIndex;  // overlay cell of `node`, or none for a leaf

    template <class Archive>
    void serialize(Archive& ar) {
      ar(node, cell);
    }
  };

  class Builder;
  friend class Builder;

  void report_node(std::uint32_t node, const DominanceBox3& q, std::vector<Point4>& out, QueryStats& stats) const;
  bool any_node(std::uint32_t node, const DominanceBox3& q, QueryStats& stats) const;
  std::uint32_t leaf_of(const PointRef& ref, std::size_t& hops, bool use_overlay) const;
  Coord decode_coord(std::uint32_t cell, std::uint32_t rank, int axis, QueryStats* stats) const;
  void account_space();

  std::size_t rho_ = 2;
  std::size_t t0_ = 4;
  std::uint32_t max_class_ = 0;
  RangeTree tree_;
  std::vector<Point4> leaves_;
  std::vector<NodeRec> nodes_;
  std::vector<ApexLocator> c_locators_;

  // C cells: cont into C', F_X, y and z orders, small_dom
  std::vector<CellRec> c_cells_;
  std::vector<std::uint32_t> c_cont_;
  std::vector<std::uint32_t> c_fx_;
  std::vector<std::uint32_t> c_yord_;
  std::vector<std::uint32_t> c_zord_;
  std::vector<SmallDom> c_dom_;

  // C' cells: per member its D cell and rank there; overlay cell and rank
  std::vector<CellRec> p_cells_;
  std::vector<std::uint32_t> p_dcell_;
  std::vector<std::uint32_t> p_dslot_;
  std::vector<std::uint32_t> p_over_;   // per C' cell
  std::vector<std::uint32_t> p_oslot_;  // per C' member

  // D cells: per member child slot and rank in the child's C' cell
  std::vector<CellRec> d_cells_;
  std::vector<std::uint8_t> d_child_;
  std::vector<std::uint32_t> d_slot_;
  std::vector<std::uint32_t> d_down_begin_;  // per D cell, into d_down_
  std::vector<std::uint32_t> d_down_;        // per child: C' cell, or none for a leaf child

  // overlay cells and their inner cuttings
  std::vector<CellRec> o_cells_;
  std::vector<std::uint32_t> o_ecell_;
  std::vector<std::uint32_t> o_eslot_;
  std::vector<CellRec> e_cells_;
  std::vector<std::uint32_t> e_target_;  // per member, index into the cell's target list
  std::vector<std::uint32_t> e_slot_;
  std::vector<std::uint32_t> e_tbegin_;  // per E cell, into e_targets_ (end = next begin)
  std::vector<Target> e_targets_;

  SpaceReport space_;
};

}  // namespace rrk
