#include "rrk/linear_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "index_util.hpp"

namespace rrk {

using detail::rank_in;

const char* to_string(CellKind kind) {
  switch (kind) {
    case CellKind::kC: return "C";
    case CellKind::kCPrime: return "C'";
    case CellKind::kD: return "D";
    case CellKind::kOverlay: return "overlay";
    case CellKind::kOverlayD: return "overlay inner";
  }
  return "?";
}

std::size_t LinearConfig::default_rho(std::size_t n) {
  const double l = log2_or_one(static_cast<double>(n));
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(std::pow(l, 0.25) - 1e-9)));
}

std::size_t LinearConfig::default_t0(std::size_t n) {
  const double l = n >= 2 ? std::log2(static_cast<double>(n)) : 0.0;
  return std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(l * l - 1e-9)));
}

// ---------------------------------------------------------------------------
// Construction

class LinearIndex::Builder {
 public:
  Builder(LinearIndex& ix, const LinearConfig& cfg)
      : ix_(ix), cfg_(cfg), bound_(detail::domain_bound(ix.leaves_.size())) {
    const std::size_t nodes = ix_.tree_.nodes().size();
    p_loc_.resize(nodes);
    o_loc_.resize(nodes);
    mark_.assign(ix_.leaves_.size(), 0);
  }

  void run() {
    const auto& tree = ix_.tree_;
    ix_.nodes_.resize(tree.nodes().size());
    // BFS order: every ancestor is done before its descendants, so mark_
    // holds exactly the points of ancestors' C cells when a node is built.
    for (std::uint32_t id = 0; id < tree.nodes().size(); ++id) {
      if (!tree.node(id).leaf()) build_node(id);
    }
    link_down();
    link_overlay();
    ix_.e_tbegin_.push_back(static_cast<std::uint32_t>(ix_.e_targets_.size()));
  }

 private:
  std::uint32_t depth_class(std::uint32_t depth) const {
    if (ix_.max_class_ == 0) return 0;
    if (depth == 0) return ix_.max_class_;
    std::uint32_t c = 0;
    std::uint64_t step = ix_.rho_;
    while (c < ix_.max_class_ && depth % step == 0) {
      ++c;
      step *= ix_.rho_;
    }
    return c;
  }

  void build_node(std::uint32_t id) {
    const auto& nd = ix_.tree_.node(id);
    const auto& leaves = ix_.leaves_;
    const std::uint32_t m = nd.size();
    const std::size_t t0 = ix_.t0_;
    std::vector<std::uint32_t> gids(m);
    std::iota(gids.begin(), gids.end(), nd.lo);
    const auto pts = detail::project(leaves, gids);

    NodeRec& rec = ix_.nodes_[id];
    rec.cls = depth_class(nd.depth);
    const CuttingOptions opts{bound_};

    // C' cutting
    Cutting cp = build_cutting(pts, 4 * t0, opts);
    rec.p_begin = detail::add_cells(cp, gids, id, ix_.p_cells_, p_gid_);
    rec.p_count = static_cast<std::uint32_t>(cp.size());

    // C cutting with small_dom per cell
    Cutting c = build_cutting(pts, t0, opts);
    rec.c_begin = static_cast<std::uint32_t>(ix_.c_cells_.size());
    rec.c_count = static_cast<std::uint32_t>(c.size());
    for (const Cell& cell : c.cells) {
      const auto cont = locate_cell_index(cp, cell.apex);
      if (!cont) throw std::logic_error("C cell not contained in any C' cell at node " + std::to_string(id));
      const std::uint32_t pc = rec.p_begin + *cont;
      ix_.c_cells_.push_back({cell.apex, id, static_cast<std::uint32_t>(ix_.c_fx_.size()),
                              static_cast<std::uint32_t>(cell.size())});
      ix_.c_cont_.push_back(pc);
      for (std::uint32_t member : cell.members) {
        const std::uint32_t g = nd.lo + member;
        ix_.c_fx_.push_back(rank_in(p_gid_, ix_.p_cells_[pc], leaves, g));
        mark_[g] = 1;
      }
      ix_.c_yord_.insert(ix_.c_yord_.end(), cell.y_order.begin(), cell.y_order.end());
      ix_.c_zord_.insert(ix_.c_zord_.end(), cell.z_order.begin(), cell.z_order.end());
      ix_.c_dom_.emplace_back(cell.local, cfg_.small);
    }
    rec.locator = static_cast<std::uint32_t>(ix_.c_locators_.size());
    ix_.c_locators_.push_back(std::move(c.locator));

    // D cutting inside every C' cell
    for (std::uint32_t j = 0; j < rec.p_count; ++j) {
      const CellRec pc = ix_.p_cells_[rec.p_begin + j];
      inner_cutting(id, pc, 2 * t0, p_gid_, ix_.d_cells_, d_gid_, ix_.p_dcell_, ix_.p_dslot_);
    }
    ix_.p_over_.resize(ix_.p_cells_.size(), kNoIndex);
    ix_.p_oslot_.resize(p_gid_.size(), kNoIndex);

    if (rec.cls >= 1) {
      const std::size_t tc = detail::ipow(ix_.rho_, rec.cls) * t0;
      Cutting o = build_cutting(pts, 4 * tc, opts);
      rec.o_begin = detail::add_cells(o, gids, id, ix_.o_cells_, o_gid_);
      rec.o_count = static_cast<std::uint32_t>(o.size());
      for (std::uint32_t j = 0; j < rec.p_count; ++j) {
        const CellRec& pc = ix_.p_cells_[rec.p_begin + j];
        const auto hit = locate_cell_index(o, pc.apex);
        if (!hit) throw std::logic_error("C' cell not contained in any overlay cell at node " + std::to_string(id));
        const std::uint32_t oc = rec.o_begin + *hit;
        ix_.p_over_[rec.p_begin + j] = oc;
        for (std::uint32_t k = 0; k < pc.size; ++k) {
          ix_.p_oslot_[pc.begin + k] = rank_in(o_gid_, ix_.o_cells_[oc], leaves, p_gid_[pc.begin + k]);
        }
      }
      for (std::uint32_t j = 0; j < rec.o_count; ++j) {
        const CellRec oc = ix_.o_cells_[rec.o_begin + j];
        inner_cutting(id, oc, 2 * tc, o_gid_, ix_.e_cells_, e_gid_, ix_.o_ecell_, ix_.o_eslot_);
      }
      o_loc_[id] = std::move(o.locator);
    }
    p_loc_[id] = std::move(cp.locator);
  }

  // Cutting with parameter t of the members of `outer`, clipped to its apex.
  // Marked members get their inner cell and rank appended to cell_of/slot_of;
  // the others get none.
  void inner_cutting(std::uint32_t id, const CellRec& outer, std::size_t t, const std::vector<std::uint32_t>& outer_gid,
                     std::vector<CellRec>& cells, std::vector<std::uint32_t>& gid, std::vector<std::uint32_t>& cell_of,
                     std::vector<std::uint32_t>& slot_of) {
    const auto& leaves = ix_.leaves_;
    std::span<const std::uint32_t> members(outer_gid.data() + outer.begin, outer.size);
    const auto sub = detail::project(leaves, members);
    Cutting d = build_cutting(sub, t, CuttingOptions{outer.apex});
    const std::uint32_t first = detail::add_cells(d, members, id, cells, gid);
    for (std::uint32_t g : members) {
      if (!mark_[g]) {
        cell_of.push_back(kNoIndex);
        slot_of.push_back(kNoIndex);
        continue;
      }
      const auto hit = locate_cell_index(d, leaves[g].xyz());
      if (!hit) throw std::logic_error("interesting point outside every inner cell at node " + std::to_string(id));
      cell_of.push_back(first + *hit);
      slot_of.push_back(rank_in(gid, cells[first + *hit], leaves, g));
    }
  }

  void link_down() {
    const auto& tree = ix_.tree_;
    const auto& leaves = ix_.leaves_;
    for (std::uint32_t i = 0; i < ix_.d_cells_.size(); ++i) {
      const CellRec& d = ix_.d_cells_[i];
      const auto& nd = tree.node(d.node);
      ix_.d_down_begin_.push_back(static_cast<std::uint32_t>(ix_.d_down_.size()));
      for (std::uint32_t r = 0; r < nd.children; ++r) {
        const std::uint32_t v = nd.first_child + r;
        if (tree.node(v).leaf()) {
          ix_.d_down_.push_back(kNoIndex);
          continue;
        }
        const auto hit = p_loc_[v].locate(d.apex);
        if (!hit) throw std::logic_error("D cell not contained in any C' cell of child " + std::to_string(v));
        ix_.d_down_.push_back(ix_.nodes_[v].p_begin + *hit);
      }
      for (std::uint32_t k = 0; k < d.size; ++k) {
        const std::uint32_t g = d_gid_[d.begin + k];
        const std::uint32_t r = tree.child_slot(d.node, g);
        ix_.d_child_.push_back(static_cast<std::uint8_t>(r));
        const std::uint32_t down = ix_.d_down_[ix_.d_down_begin_[i] + r];
        ix_.d_slot_.push_back(down == kNoIndex ? 0 : rank_in(p_gid_, ix_.p_cells_[down], leaves, g));
      }
    }
  }

  void link_overlay() {
    const auto& tree = ix_.tree_;
    const auto& leaves = ix_.leaves_;
    for (std::uint32_t i = 0; i < ix_.e_cells_.size(); ++i) {
      const CellRec& e = ix_.e_cells_[i];
      const auto& nd = tree.node(e.node);
      const std::uint32_t jump = nd.depth + static_cast<std::uint32_t>(detail::ipow(ix_.rho_, ix_.nodes_[e.node].cls));
      const auto tbegin = static_cast<std::uint32_t>(ix_.e_targets_.size());
      ix_.e_tbegin_.push_back(tbegin);
      for (std::uint32_t k = 0; k < e.size; ++k) {
        const std::uint32_t g = e_gid_[e.begin + k];
        const std::uint32_t v = tree.descendant_at(e.node, g, jump);
        std::uint32_t t = tbegin;
        while (t < ix_.e_targets_.size() && ix_.e_targets_[t].node != v) ++t;
        if (t == ix_.e_targets_.size()) {
          Target target{v, kNoIndex};
          if (!tree.node(v).leaf()) {
            const NodeRec& vr = ix_.nodes_[v];
            const auto hit = vr.o_count ? o_loc_[v].locate(e.apex) : std::nullopt;
            if (!hit) throw std::logic_error("overlay inner cell not contained in any overlay cell of node " + std::to_string(v));
            target.cell = vr.o_begin + *hit;
          }
          ix_.e_targets_.push_back(target);
        }
        ix_.e_target_.push_back(t - tbegin);
        const Target& target = ix_.e_targets_[t];
        ix_.e_slot_.push_back(target.cell == kNoIndex ? 0 : rank_in(o_gid_, ix_.o_cells_[target.cell], leaves, g));
      }
    }
  }

  LinearIndex& ix_;
  const LinearConfig& cfg_;
  Point3 bound_;
  std::vector<std::uint8_t> mark_;
  std::vector<std::uint32_t> p_gid_, d_gid_, o_gid_, e_gid_;
  std::vector<ApexLocator> p_loc_, o_loc_;
};

LinearIndex LinearIndex::build(std::span<const Point4> points, const LinearConfig& cfg) {
  LinearIndex ix;
  const std::size_t n = points.size();
  ix.leaves_ = detail::leaf_order(points);
  ix.rho_ = cfg.rho ? cfg.rho : LinearConfig::default_rho(n);
  ix.t0_ = cfg.t0 ? cfg.t0 : LinearConfig::default_t0(n);
  if (ix.rho_ < 2 || ix.rho_ > 255) throw std::invalid_argument("rho must be in [2, 255]");
  if (ix.t0_ < 1) throw std::invalid_argument("t0 must be >= 1");
  ix.max_class_ = cfg.max_class;
  ix.tree_ = RangeTree(n, ix.rho_);
  if (n > 0) {
    Builder b(ix, cfg);
    b.run();
  }
  ix.account_space();
  return ix;
}

// ---------------------------------------------------------------------------
// Decoding

std::uint32_t LinearIndex::leaf_of(const PointRef& ref, std::size_t& hops, bool use_overlay) const {
  CellKind kind = ref.kind;
  std::uint32_t cell = ref.cell;
  std::uint32_t rank = ref.rank;
  auto corrupt = [&]() { return std::logic_error("decode reached a member without a mapping"); };
  for (;;) {
    switch (kind) {
      case CellKind::kC: {
        rank = c_fx_[c_cells_[cell].begin + rank];
        cell = c_cont_[cell];
        kind = CellKind::kCPrime;
        ++hops;
        break;
      }
      case CellKind::kCPrime: {
        const CellRec& pc = p_cells_[cell];
        const std::uint32_t at = pc.begin + rank;
        if (use_overlay && p_over_[cell] != kNoIndex) {
          rank = p_oslot_[at];
          cell = p_over_[cell];
          kind = CellKind::kOverlay;
          ++hops;
          break;
        }
        if (p_dcell_[at] == kNoIndex) throw corrupt();
        cell = p_dcell_[at];
        rank = p_dslot_[at];
        kind = CellKind::kD;
        break;
      }
      case CellKind::kD: {
        const CellRec& d = d_cells_[cell];
        const std::uint32_t at = d.begin + rank;
        const std::uint32_t r = d_child_[at];
        const auto& nd = tree_.node(d.node);
        ++hops;
        const std::uint32_t v = nd.first_child + r;
        if (tree_.node(v).leaf()) return tree_.node(v).lo;
        cell = d_down_[d_down_begin_[cell] + r];
        rank = d_slot_[at];
        kind = CellKind::kCPrime;
        break;
      }
      case CellKind::kOverlay: {
        const std::uint32_t at = o_cells_[cell].begin + rank;
        if (o_ecell_[at] == kNoIndex) throw corrupt();
        cell = o_ecell_[at];
        rank = o_eslot_[at];
        kind = CellKind::kOverlayD;
        break;
      }
      case CellKind::kOverlayD: {
        const std::uint32_t at = e_cells_[cell].begin + rank;
        const Target& t = e_targets_[e_tbegin_[cell] + e_target_[at]];
        ++hops;
        if (t.cell == kNoIndex) return tree_.node(t.node).lo;
        cell = t.cell;
        rank = e_slot_[at];
        kind = CellKind::kOverlay;
        break;
      }
    }
  }
}

Point4 LinearIndex::decode(const PointRef& ref, std::size_t* hops, bool use_overlay) const {
  std::size_t h = 0;
  const std::uint32_t g = leaf_of(ref, h, use_overlay);
  if (hops) *hops = h;
  return leaves_[g];
}

std::size_t LinearIndex::hop_bound() const {
  const std::size_t h = tree_.height();
  if (max_class_ == 0) return 1 + h;
  // down steps to the first overlay node, the switch into its overlay, up to
  // rho-1 jumps per lower class, then jumps of rho^max_class
  const std::size_t top = detail::ipow(rho_, max_class_);
  return 1 + (rho_ - 1) + 1 + (rho_ - 1) * (max_class_ - 1) + (h + top - 1) / top;
}

Coord LinearIndex::decode_coord(std::uint32_t cell, std::uint32_t rank, int axis, QueryStats* stats) const {
  std::size_t hops = 0;
  const Point4& p = leaves_[leaf_of({c_cells_[cell].node, CellKind::kC, cell, rank}, hops, true)];
  if (stats) ++stats->translate_decodes;
  return axis == 0 ? p.x : axis == 1 ? p.y : p.z;
}

DominanceBox3 LinearIndex::translate_query_to_cell(std::uint32_t cell, const DominanceBox3& q, QueryStats* stats) const {
  const CellRec& c = c_cells_[cell];
  auto count = [&](Coord bound, int axis, const std::uint32_t* order) {
    // members whose coordinate is <= bound form a prefix of `order`
    std::uint32_t lo = 0, hi = c.size;
    while (lo < hi) {
      const std::uint32_t mid = lo + (hi - lo) / 2;
      const std::uint32_t rank = order ? order[mid] : mid;
      if (decode_coord(cell, rank, axis, stats) <= bound) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return static_cast<Coord>(lo);
  };
  return {count(q.a, 0, nullptr), count(q.b, 1, c_yord_.data() + c.begin), count(q.c, 2, c_zord_.data() + c.begin)};
}

// ---------------------------------------------------------------------------
// Queries

void LinearIndex::report_node(std::uint32_t id, const DominanceBox3& q, std::vector<Point4>& out,
                              QueryStats& st) const {
  ++st.nodes_visited;
  const auto& nd = tree_.node(id);
  if (nd.leaf()) {
    const Point4& p = leaves_[nd.lo];
    if (in_box(q, p.xyz())) {
      out.push_back(p);
      ++st.reported;
    }
    return;
  }
  const NodeRec& rec = nodes_[id];
  const auto hit = c_locators_[rec.locator].locate(componentwise_min(q.corner(), detail::domain_bound(size())));
  if (!hit) {
    for (std::uint32_t r = 0; r < nd.children; ++r) report_node(nd.first_child + r, q, out, st);
    return;
  }
  ++st.cells_probed;
  const std::uint32_t ci = rec.c_begin + *hit;
  const DominanceBox3 local = translate_query_to_cell(ci, q, &st);
  std::vector<std::uint32_t> slots;
  SmallDomCounters cnt;
  c_dom_[ci].query(local, slots, &cnt);
  st.small_dom_touched += cnt.touched;
  for (std::uint32_t s : slots) {
    std::size_t hops = 0;
    out.push_back(leaves_[leaf_of({id, CellKind::kC, ci, s}, hops, true)]);
    ++st.points_decoded;
    ++st.reported;
    st.record_hops(hops);
  }
}

bool LinearIndex::any_node(std::uint32_t id, const DominanceBox3& q, QueryStats& st) const {
  ++st.nodes_visited;
  const auto& nd = tree_.node(id);
  if (nd.leaf()) return in_box(q, leaves_[nd.lo].xyz());
  const NodeRec& rec = nodes_[id];
  const auto hit = c_locators_[rec.locator].locate(componentwise_min(q.corner(), detail::domain_bound(size())));
  // no cell means q dominates more than t0 points here
  if (!hit) return true;
  ++st.cells_probed;
  const std::uint32_t ci = rec.c_begin + *hit;
  return c_dom_[ci].any(translate_query_to_cell(ci, q, &st));
}

void LinearIndex::report(const Query5& q, std::vector<Point4>& out, QueryStats* stats) const {
  QueryStats local;
  QueryStats& st = stats ? *stats : local;
  const auto nodes = tree_.canonical_nodes(q.wlo, q.whi);
  st.canonical_units += nodes.size();
  if (q.box.a < 1 || q.box.b < 1 || q.box.c < 1) return;
  for (std::uint32_t u : nodes) report_node(u, q.box, out, st);
}

std::vector<PointId> LinearIndex::query(const Query5& q, QueryStats* stats) const {
  std::vector<Point4> pts;
  report(q, pts, stats);
  std::vector<PointId> ids(pts.size());
  std::transform(pts.begin(), pts.end(), ids.begin(), [](const Point4& p) { return p.id; });
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool LinearIndex::any(const Query5& q, QueryStats* stats) const {
  QueryStats local;
  QueryStats& st = stats ? *stats : local;
  const auto nodes = tree_.canonical_nodes(q.wlo, q.whi);
  st.canonical_units += nodes.size();
  if (q.box.a < 1 || q.box.b < 1 || q.box.c < 1) return false;
  for (std::uint32_t u : nodes) {
    if (any_node(u, q.box, st)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Audit

AuditReport LinearIndex::audit() const {
  AuditReport rep;
  rep.decode_hop_bound = hop_bound();
  if (leaves_.empty()) return rep;
  const detail::TruthOracle truth(tree_, leaves_);
  std::vector<std::uint8_t> mark(leaves_.size(), 0);

  for (std::uint32_t id = 0; id < tree_.nodes().size(); ++id) {
    const auto& nd = tree_.node(id);
    if (nd.leaf()) continue;
    const NodeRec& rec = nodes_[id];
    const std::string where = " at node " + std::to_string(id);

    // C cells: containment in C', F_X, orders, decoding
    for (std::uint32_t ci = rec.c_begin; ci < rec.c_begin + rec.c_count; ++ci) {
      const CellRec& c = c_cells_[ci];
      const auto members = truth.members(id, c.apex);
      rep.tally("C member lists", members.size() == c.size, where);
      if (members.size() != c.size) continue;
      const CellRec& pc = p_cells_[c_cont_[ci]];
      rep.tally("C in C'", pc.node == id && dominates(pc.apex, c.apex), where);
      const auto pmembers = truth.members(id, pc.apex);
      bool orders_ok = true;
      for (std::uint32_t k = 0; k + 1 < c.size; ++k) {
        orders_ok = orders_ok && leaves_[members[c_yord_[c.begin + k]]].y < leaves_[members[c_yord_[c.begin + k + 1]]].y &&
                    leaves_[members[c_zord_[c.begin + k]]].z < leaves_[members[c_zord_[c.begin + k + 1]]].z;
      }
      rep.tally("C cell y/z orders", orders_ok, where);
      for (std::uint32_t s = 0; s < c.size; ++s) {
        const std::uint32_t g = members[s];
        mark[g] = 1;
        const std::uint32_t f = c_fx_[c.begin + s];
        rep.tally("F_X maps into C'", f < pmembers.size() && pmembers[f] == g, where);
        for (bool overlay : {true, false}) {
          std::size_t hops = 0;
          std::uint32_t got = kNoIndex;
          try {
            got = leaf_of({id, CellKind::kC, ci, s}, hops, overlay);
          } catch (const std::exception&) {
          }
          rep.tally(overlay ? "decode round trip" : "decode round trip (base chain)", got == g, where);
          if (overlay) {
            rep.decode_hops_max = std::max(rep.decode_hops_max, hops);
            rep.tally("decode hop bound", hops <= rep.decode_hop_bound, where);
          }
        }
      }
    }

    // C' cells: interesting points reach a D cell, overlay mapping
    for (std::uint32_t pj = rec.p_begin; pj < rec.p_begin + rec.p_count; ++pj) {
      const CellRec& pc = p_cells_[pj];
      const auto members = truth.members(id, pc.apex);
      rep.tally("C' member lists", members.size() == pc.size, where);
      if (members.size() != pc.size) continue;
      for (std::uint32_t k = 0; k < pc.size; ++k) {
        const std::uint32_t g = members[k];
        if (!mark[g]) continue;
        const std::uint32_t dc = p_dcell_[pc.begin + k];
        bool ok = dc != kNoIndex && d_cells_[dc].node == id && dominates(pc.apex, d_cells_[dc].apex);
        if (ok) {
          const auto dm = truth.members(id, d_cells_[dc].apex);
          const std::uint32_t slot = p_dslot_[pc.begin + k];
          ok = slot < dm.size() && dm[slot] == g;
        }
        rep.tally("interesting point in a D cell", ok, where);
      }
      if (p_over_[pj] != kNoIndex) {
        const CellRec& oc = o_cells_[p_over_[pj]];
        rep.tally("overlay contains C' cell", oc.node == id && dominates(oc.apex, pc.apex), where);
        const auto om = truth.members(id, oc.apex);
        for (std::uint32_t k = 0; k < pc.size; ++k) {
          const std::uint32_t slot = p_oslot_[pc.begin + k];
          rep.tally("C' to overlay ranks", slot < om.size() && om[slot] == members[k], where);
        }
      }
    }

    // overlay cells: interesting points covered by inner cells
    for (std::uint32_t oj = rec.o_begin; oj < rec.o_begin + rec.o_count; ++oj) {
      const CellRec& oc = o_cells_[oj];
      const auto members = truth.members(id, oc.apex);
      rep.tally("overlay member lists", members.size() == oc.size, where);
      if (members.size() != oc.size) continue;
      for (std::uint32_t k = 0; k < oc.size; ++k) {
        const std::uint32_t g = members[k];
        if (!mark[g]) continue;
        const std::uint32_t ec = o_ecell_[oc.begin + k];
        bool ok = ec != kNoIndex && e_cells_[ec].node == id && dominates(oc.apex, e_cells_[ec].apex);
        if (ok) {
          const auto em = truth.members(id, e_cells_[ec].apex);
          const std::uint32_t slot = o_eslot_[oc.begin + k];
          ok = slot < em.size() && em[slot] == g;
        }
        rep.tally("overlay interesting point in an inner cell", ok, where);
      }
    }
  }

  // D cells: containment in the child's C' and F''
  for (std::uint32_t di = 0; di < d_cells_.size(); ++di) {
    const CellRec& d = d_cells_[di];
    const auto& nd = tree_.node(d.node);
    const std::string where = " at node " + std::to_string(d.node);
    const auto members = truth.members(d.node, d.apex);
    rep.tally("D member lists", members.size() == d.size, where);
    if (members.size() != d.size) continue;
    std::vector<std::vector<std::uint32_t>> child_members(nd.children);
    for (std::uint32_t r = 0; r < nd.children; ++r) {
      const std::uint32_t v = nd.first_child + r;
      const std::uint32_t down = d_down_[d_down_begin_[di] + r];
      if (tree_.node(v).leaf()) {
        rep.tally("D in child's C'", down == kNoIndex, where);
        continue;
      }
      const bool ok = down != kNoIndex && p_cells_[down].node == v && dominates(p_cells_[down].apex, d.apex);
      rep.tally("D in child's C'", ok, where);
      if (ok) child_members[r] = truth.members(v, p_cells_[down].apex);
    }
    for (std::uint32_t k = 0; k < d.size; ++k) {
      const std::uint32_t g = members[k];
      const std::uint32_t r = d_child_[d.begin + k];
      const std::uint32_t v = nd.first_child + r;
      bool ok = r < nd.children && tree_.node(v).lo <= g && g < tree_.node(v).hi;
      if (ok && !tree_.node(v).leaf()) {
        const std::uint32_t slot = d_slot_[d.begin + k];
        ok = slot < child_members[r].size() && child_members[r][slot] == g;
      }
      rep.tally("F'' child index and rank", ok, where);
    }
  }

  // overlay inner cells: targets contain them
  for (std::uint32_t ei = 0; ei < e_cells_.size(); ++ei) {
    const CellRec& e = e_cells_[ei];
    const std::string where = " at node " + std::to_string(e.node);
    const auto members = truth.members(e.node, e.apex);
    rep.tally("overlay inner member lists", members.size() == e.size, where);
    if (members.size() != e.size) continue;
    const std::uint32_t jump =
        tree_.node(e.node).depth + static_cast<std::uint32_t>(detail::ipow(rho_, nodes_[e.node].cls));
    for (std::uint32_t k = 0; k < e.size; ++k) {
      const std::uint32_t g = members[k];
      const Target& t = e_targets_[e_tbegin_[ei] + e_target_[e.begin + k]];
      bool ok = t.node == tree_.descendant_at(e.node, g, jump);
      if (ok && t.cell != kNoIndex) {
        const CellRec& oc = o_cells_[t.cell];
        ok = oc.node == t.node && dominates(oc.apex, e.apex);
        const auto om = truth.members(t.node, oc.apex);
        const std::uint32_t slot = e_slot_[e.begin + k];
        ok = ok && slot < om.size() && om[slot] == g;
      } else if (ok) {
        ok = tree_.node(t.node).leaf();
      }
      rep.tally("overlay jump targets", ok, where);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Space

void LinearIndex::account_space() {
  SpaceReport& s = space_;
  s = SpaceReport{};
  const std::uint64_t n = leaves_.size();
  const std::uint64_t coord = bits_for(n + 1);
  s.add_bits("leaves", n * (4 * coord + 32));
  s.add_bits("tree", tree_.nodes().size() * 2 * bits_for(tree_.nodes().size() + 1));
  const std::uint64_t cells = c_cells_.size() + p_cells_.size() + d_cells_.size() + o_cells_.size() + e_cells_.size();
  s.add_bits("apexes", cells * 3 * coord);
  s.add_bits("node cutting offsets", nodes_.size() * 6 * bits_for(cells + 1));

  std::uint64_t loc = 0;
  for (const auto& l : c_locators_) loc += l.entries() * bits_for(l.size() + 1);
  s.add_bits("C locators", loc);

  std::uint64_t cmember = 0, cont = 0, dom = 0;
  for (std::uint32_t ci = 0; ci < c_cells_.size(); ++ci) {
    const CellRec& c = c_cells_[ci];
    const NodeRec& rec = nodes_[c.node];
    const CellRec& pc = p_cells_[c_cont_[ci]];
    cmember += c.size * (bits_for(pc.size) + 2 * bits_for(c.size));
    cont += bits_for(rec.p_count);
    dom += c_dom_[ci].design_bits();
  }
  s.add_bits("C F_X and orders", cmember);
  s.add_bits("C cont", cont);
  s.add_bits("small_dom", dom);

  // Per member of a C' or overlay cell: a flag, the inner cell among that
  // cell's inner cells, and the rank inside it.
  auto inner_bits = [&](const CellRec& outer, const std::vector<std::uint32_t>& cell_of,
                        const std::vector<CellRec>& inner) {
    std::uint32_t lo = kNoIndex, hi = 0, size_max = 0;
    for (std::uint32_t k = 0; k < outer.size; ++k) {
      const std::uint32_t ic = cell_of[outer.begin + k];
      if (ic == kNoIndex) continue;
      lo = std::min(lo, ic);
      hi = std::max(hi, ic);
      size_max = std::max(size_max, inner[ic].size);
    }
    const std::uint64_t count = lo == kNoIndex ? 0 : hi - lo + 1;
    return static_cast<std::uint64_t>(outer.size) * (1 + bits_for(count) + bits_for(size_max));
  };
  std::uint64_t p2d = 0, p2o = 0;
  for (std::uint32_t pj = 0; pj < p_cells_.size(); ++pj) {
    const CellRec& pc = p_cells_[pj];
    p2d += inner_bits(pc, p_dcell_, d_cells_);
    if (p_over_[pj] != kNoIndex) {
      p2o += bits_for(nodes_[pc.node].o_count) + pc.size * bits_for(o_cells_[p_over_[pj]].size);
    }
  }
  s.add_bits("C' to D", p2d);
  s.add_bits("C' to overlay", p2o);

  std::uint64_t dmem = 0, down = 0;
  for (std::uint32_t di = 0; di < d_cells_.size(); ++di) {
    const CellRec& d = d_cells_[di];
    const auto& nd = tree_.node(d.node);
    std::uint32_t target_max = 0;
    for (std::uint32_t r = 0; r < nd.children; ++r) {
      const std::uint32_t t = d_down_[d_down_begin_[di] + r];
      if (t != kNoIndex) {
        target_max = std::max(target_max, p_cells_[t].size);
        down += bits_for(nodes_[p_cells_[t].node].p_count);
      }
    }
    dmem += d.size * (bits_for(nd.children) + bits_for(target_max));
  }
  s.add_bits("D child and F''", dmem);
  s.add_bits("D down", down);

  std::uint64_t o2e = 0;
  for (const CellRec& oc : o_cells_) o2e += inner_bits(oc, o_ecell_, e_cells_);
  s.add_bits("overlay to inner", o2e);

  std::uint64_t emem = 0, etargets = 0;
  for (std::uint32_t ei = 0; ei < e_cells_.size(); ++ei) {
    const CellRec& e = e_cells_[ei];
    const std::uint32_t tb = e_tbegin_[ei], te = e_tbegin_[ei + 1];
    std::uint32_t target_max = 0;
    for (std::uint32_t t = tb; t < te; ++t) {
      if (e_targets_[t].cell != kNoIndex) target_max = std::max(target_max, o_cells_[e_targets_[t].cell].size);
    }
    emem += e.size * (bits_for(te - tb) + bits_for(target_max));
    etargets += (te - tb) * (bits_for(tree_.nodes().size()) + bits_for(o_cells_.size() + 1));
  }
  s.add_bits("overlay inner members", emem);
  s.add_bits("overlay jump targets", etargets);

  auto bytes = [](const auto& v) { return static_cast<std::uint64_t>(v.capacity() * sizeof(v[0])); };
  s.add_bytes("leaves", bytes(leaves_));
  s.add_bytes("tree", bytes(tree_.nodes()) + bytes(nodes_));
  std::uint64_t lb = 0;
  for (const auto& l : c_locators_) lb += l.physical_bytes();
  s.add_bytes("C locators", lb);
  s.add_bytes("C cells", bytes(c_cells_) + bytes(c_cont_) + bytes(c_fx_) + bytes(c_yord_) + bytes(c_zord_));
  std::uint64_t db = 0;
  for (const auto& d : c_dom_) db += d.physical_bytes();
  s.add_bytes("small_dom", db);
  s.add_bytes("C' cells", bytes(p_cells_) + bytes(p_dcell_) + bytes(p_dslot_) + bytes(p_over_) + bytes(p_oslot_));
  s.add_bytes("D cells", bytes(d_cells_) + bytes(d_child_) + bytes(d_slot_) + bytes(d_down_begin_) + bytes(d_down_));
  s.add_bytes("overlay cells", bytes(o_cells_) + bytes(o_ecell_) + bytes(o_eslot_) + bytes(e_cells_) + bytes(e_target_) +
                                   bytes(e_slot_) + bytes(e_tbegin_) + bytes(e_targets_));
}

}  // namespace rrk
