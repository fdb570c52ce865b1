#include "rrk/fast_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "index_util.hpp"

namespace rrk {

using detail::rank_in;

std::size_t FastConfig::default_t0(std::size_t n) {
  const double l = n >= 2 ? std::log2(static_cast<double>(n)) : 0.0;
  return std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(l * l - 1e-9)));
}

namespace {

std::uint32_t classes_for_height(std::size_t rho, std::uint32_t height) {
  // smallest c with rho^c >= height, minus one
  std::uint32_t c = 0;
  for (std::uint64_t p = 1; p < height; p *= rho) ++c;
  return c > 0 ? c - 1 : 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

class FastIndex::Builder {
 public:
  Builder(FastIndex& ix, const FastConfig& cfg)
      : ix_(ix), cfg_(cfg), bound_(detail::domain_bound(ix.leaves_.size())) {
    const std::size_t nodes = ix_.tree_.nodes().size();
    arrivals_.resize(nodes);
    full_loc_.resize(nodes);
    stamp_.assign(ix_.leaves_.size(), 0);
  }

  void run() {
    const auto& tree = ix_.tree_;
    const auto count = static_cast<std::uint32_t>(tree.nodes().size());
    ix_.nodes_.resize(count);
    for (std::uint32_t id = 0; id < count; ++id) {
      const auto& nd = tree.node(id);
      NodeRec& rec = ix_.nodes_[id];
      rec.cls = depth_class(nd.depth);
      rec.lazy = nd.leaf() || nd.size() <= t_class(rec.cls + 1);
    }
    // BFS order: all arrivals at a node come from ancestors, built earlier
    for (std::uint32_t id = 0; id < count; ++id) {
      if (!tree.node(id).leaf()) build_node(id);
    }
    ix_.e_tbegin_.push_back(static_cast<std::uint32_t>(ix_.e_targets_.size()));
    link_targets();
  }

 private:
  std::uint64_t t_class(std::uint32_t c) const { return detail::ipow(ix_.rho_, c) * ix_.t0_; }

  std::uint32_t depth_class(std::uint32_t depth) const {
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
    ix_.nodes_[id].pair_begin = static_cast<std::uint32_t>(ix_.pairs_.size());
    for (std::uint32_t l = 0; l < nd.children; ++l) {
      for (std::uint32_t r = l; r < nd.children; ++r) build_pair(id, l, r);
    }
    arrivals_[id] = {};
  }

  void build_pair(std::uint32_t id, std::uint32_t l, std::uint32_t r) {
    const auto& tree = ix_.tree_;
    const auto& leaves = ix_.leaves_;
    const auto& nd = tree.node(id);
    const NodeRec& rec = ix_.nodes_[id];
    const bool full = l == 0 && r + 1 == nd.children;
    const auto pi = static_cast<std::uint32_t>(ix_.pairs_.size());
    PairRec pr{id, l, r};

    const std::uint32_t lo = tree.node(nd.first_child + l).lo;
    const std::uint32_t hi = tree.node(nd.first_child + r).hi;
    std::vector<std::uint32_t> gids(hi - lo);
    std::iota(gids.begin(), gids.end(), lo);
    const auto pts = detail::project(leaves, gids);
    const CuttingOptions opts{bound_};
    const std::uint64_t tnext = t_class(rec.cls + 1);

    Cutting o;
    if (!rec.lazy) {
      o = build_cutting(pts, 4 * tnext, opts);
      pr.o_begin = detail::add_cells(o, gids, id, ix_.o_cells_, o_gid_);
      pr.o_count = static_cast<std::uint32_t>(o.size());
    }

    const std::uint32_t mark = ++stamp_value_;
    Cutting c = build_cutting(pts, ix_.t0_, opts);
    pr.c_begin = static_cast<std::uint32_t>(ix_.c_cells_.size());
    pr.c_count = static_cast<std::uint32_t>(c.size());
    std::vector<Coord> xs, ys, zs;
    for (const Cell& cell : c.cells) {
      ix_.c_cells_.push_back({cell.apex, id, static_cast<std::uint32_t>(ix_.c_slot_.size()),
                              static_cast<std::uint32_t>(cell.size())});
      ix_.c_pair_.push_back(pi);
      std::uint32_t oc = kNoIndex;
      if (!rec.lazy) {
        const auto hit = locate_cell_index(o, cell.apex);
        if (!hit) throw std::logic_error("C cell not contained in any overlay cell at node " + std::to_string(id));
        oc = pr.o_begin + *hit;
      }
      ix_.c_cont_.push_back(oc);
      xs.clear();
      ys.clear();
      zs.clear();
      for (std::uint32_t member : cell.members) {
        const std::uint32_t g = lo + member;
        xs.push_back(leaves[g].x);
        if (rec.lazy) {
          ix_.c_slot_.push_back(g);
        } else {
          ix_.c_slot_.push_back(rank_in(o_gid_, ix_.o_cells_[oc], leaves, g));
          stamp_[g] = mark;
        }
      }
      for (std::uint32_t s : cell.y_order) ys.push_back(leaves[lo + cell.members[s]].y);
      for (std::uint32_t s : cell.z_order) zs.push_back(leaves[lo + cell.members[s]].z);
      ix_.c_yord_.insert(ix_.c_yord_.end(), cell.y_order.begin(), cell.y_order.end());
      ix_.c_zord_.insert(ix_.c_zord_.end(), cell.z_order.begin(), cell.z_order.end());
      ix_.c_dom_.emplace_back(cell.local, cfg_.small);
      for (const auto* v : {&xs, &ys, &zs}) ix_.c_pred_.emplace_back(*v, ix_.fence_step_);
    }
    ix_.c_locators_.push_back(std::move(c.locator));

    if (!rec.lazy) {
      if (full) {
        for (std::uint32_t g : arrivals_[id]) stamp_[g] = mark;
      }
      const std::uint32_t jump_step = static_cast<std::uint32_t>(detail::ipow(ix_.rho_, rec.cls + 1));
      const std::uint32_t jump = (nd.depth / jump_step + 1) * jump_step;
      for (std::uint32_t j = 0; j < pr.o_count; ++j) {
        const CellRec oc = ix_.o_cells_[pr.o_begin + j];
        std::span<const std::uint32_t> members(o_gid_.data() + oc.begin, oc.size);
        const auto sub = detail::project(leaves, members);
        Cutting e = build_cutting(sub, 2 * tnext, CuttingOptions{oc.apex});
        const std::uint32_t first = detail::add_cells(e, members, id, ix_.e_cells_, e_gid_);
        ix_.e_pair_.resize(ix_.e_cells_.size(), pi);
        for (std::uint32_t g : members) {
          if (stamp_[g] != mark) {
            ix_.o_ecell_.push_back(kNoIndex);
            ix_.o_eslot_.push_back(kNoIndex);
            continue;
          }
          const auto hit = locate_cell_index(e, leaves[g].xyz());
          if (!hit) throw std::logic_error("needed point outside every inner cell at node " + std::to_string(id));
          ix_.o_ecell_.push_back(first + *hit);
          ix_.o_eslot_.push_back(rank_in(e_gid_, ix_.e_cells_[first + *hit], leaves, g));
        }
        for (std::uint32_t k = first; k < ix_.e_cells_.size(); ++k) add_targets(k, jump, mark);
      }
      if (full) full_loc_[id] = std::move(o.locator);
    }
    ix_.pairs_.push_back(pr);
  }

  // Target list of inner cell k: the distinct descendants its members go to.
  void add_targets(std::uint32_t k, std::uint32_t jump, std::uint32_t mark) {
    const auto& tree = ix_.tree_;
    const CellRec& e = ix_.e_cells_[k];
    const auto tbegin = static_cast<std::uint32_t>(ix_.e_targets_.size());
    ix_.e_tbegin_.push_back(tbegin);
    for (std::uint32_t s = 0; s < e.size; ++s) {
      const std::uint32_t g = e_gid_[e.begin + s];
      std::uint32_t v = tree.descendant_at(e.node, g, jump);
      if (ix_.nodes_[v].lazy) v = tree.leaf_node(g);
      std::uint32_t t = tbegin;
      while (t < ix_.e_targets_.size() && ix_.e_targets_[t].node != v) ++t;
      if (t == ix_.e_targets_.size()) ix_.e_targets_.push_back({v, kNoIndex});
      ix_.e_target_.push_back(t - tbegin);
      ix_.e_slot_.push_back(0);
      if (stamp_[g] == mark && !tree.node(v).leaf()) arrivals_[v].push_back(g);
    }
  }

  void link_targets() {
    const auto& tree = ix_.tree_;
    const auto& leaves = ix_.leaves_;
    for (std::uint32_t k = 0; k < ix_.e_cells_.size(); ++k) {
      const CellRec& e = ix_.e_cells_[k];
      const std::uint32_t tb = ix_.e_tbegin_[k], te = ix_.e_tbegin_[k + 1];
      for (std::uint32_t t = tb; t < te; ++t) {
        Target& target = ix_.e_targets_[t];
        if (tree.node(target.node).leaf()) continue;
        const auto hit = full_loc_[target.node].locate(e.apex);
        if (!hit) {
          throw std::logic_error("inner cell not contained in any overlay cell of node " + std::to_string(target.node));
        }
        const auto& vn = tree.node(target.node);
        target.cell = ix_.pairs_[ix_.pair_index(target.node, 0, vn.children - 1)].o_begin + *hit;
      }
      for (std::uint32_t s = 0; s < e.size; ++s) {
        const Target& target = ix_.e_targets_[tb + ix_.e_target_[e.begin + s]];
        if (target.cell == kNoIndex) continue;
        ix_.e_slot_[e.begin + s] = rank_in(o_gid_, ix_.o_cells_[target.cell], leaves, e_gid_[e.begin + s]);
      }
    }
  }

  FastIndex& ix_;
  const FastConfig& cfg_;
  Point3 bound_;
  std::vector<std::vector<std::uint32_t>> arrivals_;
  std::vector<ApexLocator> full_loc_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t stamp_value_ = 0;
  std::vector<std::uint32_t> o_gid_, e_gid_;
};

FastIndex FastIndex::build(std::span<const Point4> points, const FastConfig& cfg) {
  FastIndex ix;
  const std::size_t n = points.size();
  ix.leaves_ = detail::leaf_order(points);
  ix.rho_ = cfg.rho ? cfg.rho : FastConfig::kDefaultRho;
  ix.t0_ = cfg.t0 ? cfg.t0 : FastConfig::default_t0(n);
  if (ix.rho_ < 2 || ix.rho_ > 255) throw std::invalid_argument("rho must be in [2, 255]");
  if (ix.t0_ < 1) throw std::invalid_argument("t0 must be >= 1");
  ix.fence_step_ = cfg.fence_step ? cfg.fence_step : static_cast<std::uint32_t>(bits_for(n + 1));
  ix.tree_ = RangeTree(n, ix.rho_);
  ix.max_class_ = classes_for_height(ix.rho_, ix.tree_.height());
  if (n > 0) {
    Builder b(ix, cfg);
    b.run();
  }
  ix.account_space();
  return ix;
}

std::uint32_t FastIndex::pair_index(std::uint32_t node, std::uint32_t l, std::uint32_t r) const {
  const std::uint32_t deg = tree_.node(node).children;
  return nodes_[node].pair_begin + l * deg - l * (l - 1) / 2 + (r - l);
}

std::pair<std::uint32_t, std::uint32_t> FastIndex::pair_leaves(std::uint32_t node, std::uint32_t l,
                                                               std::uint32_t r) const {
  const auto& nd = tree_.node(node);
  return {tree_.node(nd.first_child + l).lo, tree_.node(nd.first_child + r).hi};
}

std::vector<Point3> FastIndex::pair_apexes(std::uint32_t node, std::uint32_t l, std::uint32_t r) const {
  const PairRec& pr = pairs_[pair_index(node, l, r)];
  std::vector<Point3> out;
  for (std::uint32_t i = pr.c_begin; i < pr.c_begin + pr.c_count; ++i) out.push_back(c_cells_[i].apex);
  return out;
}

double FastIndex::epsilon() const {
  const double l = leaves_.size() >= 2 ? std::log2(static_cast<double>(leaves_.size())) : 1.0;
  return l > 1.0 ? std::log(static_cast<double>(rho_)) / std::log(l) : 1.0;
}

std::size_t FastIndex::hop_bound() const {
  const double l = leaves_.size() >= 2 ? std::log2(static_cast<double>(leaves_.size())) : 1.0;
  const double inv = std::max(0.0, std::log(l) / std::log(static_cast<double>(rho_)));
  return static_cast<std::size_t>(std::ceil(inv - 1e-9)) + 1;
}

// ---------------------------------------------------------------------------
// Decoding

std::uint32_t FastIndex::leaf_of(std::uint32_t cell, std::uint32_t rank, std::size_t& hops) const {
  const std::uint32_t at = c_cells_[cell].begin + rank;
  hops = 1;
  if (c_cont_[cell] == kNoIndex) return c_slot_[at];
  std::uint32_t oc = c_cont_[cell];
  std::uint32_t r = c_slot_[at];
  for (;;) {
    const std::uint32_t oat = o_cells_[oc].begin + r;
    const std::uint32_t ec = o_ecell_[oat];
    if (ec == kNoIndex) throw std::logic_error("decode reached an overlay member without a mapping");
    const std::uint32_t eat = e_cells_[ec].begin + o_eslot_[oat];
    const Target& t = e_targets_[e_tbegin_[ec] + e_target_[eat]];
    ++hops;
    if (t.cell == kNoIndex) return tree_.node(t.node).lo;
    oc = t.cell;
    r = e_slot_[eat];
  }
}

Point4 FastIndex::decode(const PointRef& ref, std::size_t* hops) const {
  std::size_t h = 0;
  const std::uint32_t g = leaf_of(ref.cell, ref.rank, h);
  if (hops) *hops = h;
  return leaves_[g];
}

DominanceBox3 FastIndex::translate_query_to_cell(std::uint32_t cell, const DominanceBox3& q, QueryStats* stats) const {
  const CellRec& c = c_cells_[cell];
  auto axis_count = [&](int axis, Coord bound) {
    const std::uint32_t* order = axis == 1 ? c_yord_.data() + c.begin : axis == 2 ? c_zord_.data() + c.begin : nullptr;
    auto at = [&](std::uint32_t i) {
      std::size_t hops = 0;
      const Point4& p = leaves_[leaf_of(cell, order ? order[i] : i, hops)];
      if (stats) ++stats->translate_decodes;
      return axis == 0 ? p.x : axis == 1 ? p.y : p.z;
    };
    return static_cast<Coord>(c_pred_[3 * cell + axis].count_le(bound, at));
  };
  return {axis_count(0, q.a), axis_count(1, q.b), axis_count(2, q.c)};
}

// ---------------------------------------------------------------------------
// Queries

void FastIndex::report_pair(std::uint32_t pi, const DominanceBox3& q, std::vector<Point4>& out,
                            QueryStats& st) const {
  ++st.nodes_visited;
  const PairRec& pr = pairs_[pi];
  const auto hit = c_locators_[pi].locate(componentwise_min(q.corner(), detail::domain_bound(size())));
  if (hit) {
    ++st.cells_probed;
    const std::uint32_t ci = pr.c_begin + *hit;
    const DominanceBox3 local = translate_query_to_cell(ci, q, &st);
    std::vector<std::uint32_t> slots;
    SmallDomCounters cnt;
    c_dom_[ci].query(local, slots, &cnt);
    st.small_dom_touched += cnt.touched;
    for (std::uint32_t s : slots) {
      std::size_t hops = 0;
      out.push_back(leaves_[leaf_of(ci, s, hops)]);
      ++st.points_decoded;
      ++st.reported;
      st.record_hops(hops);
    }
    return;
  }
  // q dominates more than t0 points of the run: expand its children
  const auto& nd = tree_.node(pr.node);
  for (std::uint32_t s = pr.l; s <= pr.r; ++s) {
    const std::uint32_t v = nd.first_child + s;
    const auto& vn = tree_.node(v);
    if (vn.leaf()) {
      ++st.nodes_visited;
      if (in_box(q, leaves_[vn.lo].xyz())) {
        out.push_back(leaves_[vn.lo]);
        ++st.reported;
      }
    } else {
      report_pair(pair_index(v, 0, vn.children - 1), q, out, st);
    }
  }
}

bool FastIndex::any_pair(std::uint32_t pi, const DominanceBox3& q, QueryStats& st) const {
  ++st.nodes_visited;
  const auto hit = c_locators_[pi].locate(componentwise_min(q.corner(), detail::domain_bound(size())));
  if (!hit) return true;
  ++st.cells_probed;
  const std::uint32_t ci = pairs_[pi].c_begin + *hit;
  return c_dom_[ci].any(translate_query_to_cell(ci, q, &st));
}

void FastIndex::report(const Query5& q, std::vector<Point4>& out, QueryStats* stats) const {
  QueryStats local;
  QueryStats& st = stats ? *stats : local;
  const auto units = tree_.canonical_pairs(q.wlo, q.whi);
  st.canonical_units += units.size();
  if (q.box.a < 1 || q.box.b < 1 || q.box.c < 1) return;
  for (const auto& u : units) {
    const auto& nd = tree_.node(u.node);
    if (nd.leaf()) {
      ++st.nodes_visited;
      if (in_box(q.box, leaves_[nd.lo].xyz())) {
        out.push_back(leaves_[nd.lo]);
        ++st.reported;
      }
      continue;
    }
    report_pair(pair_index(u.node, u.l, u.r), q.box, out, st);
  }
}

std::vector<PointId> FastIndex::query(const Query5& q, QueryStats* stats) const {
  std::vector<Point4> pts;
  report(q, pts, stats);
  std::vector<PointId> ids(pts.size());
  std::transform(pts.begin(), pts.end(), ids.begin(), [](const Point4& p) { return p.id; });
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool FastIndex::any(const Query5& q, QueryStats* stats) const {
  QueryStats local;
  QueryStats& st = stats ? *stats : local;
  const auto units = tree_.canonical_pairs(q.wlo, q.whi);
  st.canonical_units += units.size();
  if (q.box.a < 1 || q.box.b < 1 || q.box.c < 1) return false;
  for (const auto& u : units) {
    const auto& nd = tree_.node(u.node);
    if (nd.leaf()) {
      ++st.nodes_visited;
      if (in_box(q.box, leaves_[nd.lo].xyz())) return true;
      continue;
    }
    if (any_pair(pair_index(u.node, u.l, u.r), q.box, st)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Audit

AuditReport FastIndex::audit() const {
  AuditReport rep;
  rep.decode_hop_bound = hop_bound();
  if (leaves_.empty()) return rep;
  const detail::TruthOracle truth(tree_, leaves_);
  auto by_x = [&](std::uint32_t a, std::uint32_t b) { return leaves_[a].x < leaves_[b].x; };
  auto dominated = [&](const std::vector<std::uint32_t>& set, const Point3& apex) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t g : set) {
      if (leaves_[g].x > apex.x) break;
      if (leaves_[g].y <= apex.y && leaves_[g].z <= apex.z) out.push_back(g);
    }
    return out;
  };

  for (std::uint32_t pi = 0; pi < pairs_.size(); ++pi) {
    const PairRec& pr = pairs_[pi];
    const auto& nd = tree_.node(pr.node);
    const std::string where = " at node " + std::to_string(pr.node) + " run " + std::to_string(pr.l) + ".." +
                              std::to_string(pr.r);

    // brute-force union of the children's sets
    std::vector<std::uint32_t> set;
    for (std::uint32_t s = pr.l; s <= pr.r; ++s) {
      const auto& ch = tree_.node(nd.first_child + s);
      for (std::uint32_t g = ch.lo; g < ch.hi; ++g) set.push_back(g);
    }
    const auto [lo, hi] = pair_leaves(pr.node, pr.l, pr.r);
    bool same = set.size() == hi - lo;
    for (std::size_t i = 0; same && i < set.size(); ++i) same = set[i] == lo + i;
    rep.tally("run set is the union of its children", same, where);
    std::sort(set.begin(), set.end(), by_x);

    for (std::uint32_t ci = pr.c_begin; ci < pr.c_begin + pr.c_count; ++ci) {
      const CellRec& c = c_cells_[ci];
      const auto members = dominated(set, c.apex);
      rep.tally("C member lists", members.size() == c.size, where);
      if (members.size() != c.size) continue;
      const std::uint32_t oc = c_cont_[ci];
      std::vector<std::uint32_t> om;
      if (!nodes_[pr.node].lazy) {
        const bool ok = oc != kNoIndex && oc >= pr.o_begin && oc < pr.o_begin + pr.o_count &&
                        dominates(o_cells_[oc].apex, c.apex);
        rep.tally("C cell inside an overlay cell", ok, where);
        if (!ok) continue;
        om = dominated(set, o_cells_[oc].apex);
      }
      bool orders_ok = true;
      for (std::uint32_t k = 0; k + 1 < c.size; ++k) {
        orders_ok = orders_ok &&
                    leaves_[members[c_yord_[c.begin + k]]].y < leaves_[members[c_yord_[c.begin + k + 1]]].y &&
                    leaves_[members[c_zord_[c.begin + k]]].z < leaves_[members[c_zord_[c.begin + k + 1]]].z;
      }
      rep.tally("C cell y/z orders", orders_ok, where);
      for (std::uint32_t s = 0; s < c.size; ++s) {
        const std::uint32_t g = members[s];
        const std::uint32_t slot = c_slot_[c.begin + s];
        if (nodes_[pr.node].lazy) {
          rep.tally("C member leaf references", slot == g, where);
        } else {
          const bool ok = slot < om.size() && om[slot] == g;
          rep.tally("C to overlay ranks", ok, where);
          if (ok) {
            const std::uint32_t at = o_cells_[oc].begin + slot;
            rep.tally("cell members reach an inner cell", o_ecell_[at] != kNoIndex, where);
          }
        }
        std::size_t hops = 0;
        std::uint32_t got = kNoIndex;
        try {
          got = leaf_of(ci, s, hops);
        } catch (const std::exception&) {
        }
        rep.tally("decode round trip", got == g, where);
        rep.decode_hops_max = std::max(rep.decode_hops_max, hops);
        rep.tally("decode hop bound", hops <= rep.decode_hop_bound, where);
      }
      // predecessor searches against plain binary search and the truth
      for (int axis = 0; axis < 3; ++axis) {
        std::vector<Coord> vals;
        for (std::uint32_t g : members) vals.push_back(axis == 0 ? leaves_[g].x : axis == 1 ? leaves_[g].y : leaves_[g].z);
        std::sort(vals.begin(), vals.end());
        auto at = [&](std::uint32_t i) { return vals[i]; };
        bool ok = true;
        for (Coord v : vals) {
          for (Coord b : {v - 1, v, v + 1}) {
            const auto want = static_cast<std::uint32_t>(std::upper_bound(vals.begin(), vals.end(), b) - vals.begin());
            ok = ok && c_pred_[3 * ci + axis].count_le(b, at) == want && count_le_plain(c.size, b, at) == want;
          }
        }
        rep.tally("predecessor search", ok, where);
      }
    }

    for (std::uint32_t oj = pr.o_begin; oj < pr.o_begin + pr.o_count; ++oj) {
      const CellRec& oc = o_cells_[oj];
      const auto members = dominated(set, oc.apex);
      rep.tally("overlay member lists", members.size() == oc.size, where);
      if (members.size() != oc.size) continue;
      for (std::uint32_t k = 0; k < oc.size; ++k) {
        const std::uint32_t ec = o_ecell_[oc.begin + k];
        if (ec == kNoIndex) continue;
        bool ok = e_pair_[ec] == pi && dominates(oc.apex, e_cells_[ec].apex);
        if (ok) {
          const auto em = dominated(set, e_cells_[ec].apex);
          const std::uint32_t slot = o_eslot_[oc.begin + k];
          ok = slot < em.size() && em[slot] == members[k];
        }
        rep.tally("overlay point in an inner cell", ok, where);
      }
    }
  }

  for (std::uint32_t k = 0; k < e_cells_.size(); ++k) {
    const CellRec& e = e_cells_[k];
    const PairRec& pr = pairs_[e_pair_[k]];
    const std::string where = " at node " + std::to_string(e.node);
    const auto [lo, hi] = pair_leaves(pr.node, pr.l, pr.r);
    std::vector<std::uint32_t> set(hi - lo);
    std::iota(set.begin(), set.end(), lo);
    std::sort(set.begin(), set.end(), by_x);
    const auto members = dominated(set, e.apex);
    rep.tally("inner member lists", members.size() == e.size, where);
    if (members.size() != e.size) continue;
    const std::uint32_t step = static_cast<std::uint32_t>(detail::ipow(rho_, nodes_[e.node].cls + 1));
    const std::uint32_t jump = (tree_.node(e.node).depth / step + 1) * step;
    for (std::uint32_t s = 0; s < e.size; ++s) {
      const std::uint32_t g = members[s];
      const Target& t = e_targets_[e_tbegin_[k] + e_target_[e.begin + s]];
      std::uint32_t want = tree_.descendant_at(e.node, g, jump);
      if (nodes_[want].lazy) want = tree_.leaf_node(g);
      bool ok = t.node == want;
      if (ok && t.cell != kNoIndex) {
        const CellRec& oc = o_cells_[t.cell];
        const auto& vn = tree_.node(t.node);
        const PairRec& full = pairs_[pair_index(t.node, 0, vn.children - 1)];
        ok = t.cell >= full.o_begin && t.cell < full.o_begin + full.o_count && dominates(oc.apex, e.apex);
        if (ok) {
          const auto om = truth.members(t.node, oc.apex);
          const std::uint32_t slot = e_slot_[e.begin + s];
          ok = slot < om.size() && om[slot] == g;
        }
      } else if (ok) {
        ok = tree_.node(t.node).leaf();
      }
      rep.tally("inner cell jump targets", ok, where);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Space

void FastIndex::account_space() {
  SpaceReport& s = space_;
  s = SpaceReport{};
  const std::uint64_t n = leaves_.size();
  const std::uint64_t coord = bits_for(n + 1);
  s.add_bits("leaves", n * (4 * coord + 32));
  s.add_bits("tree", tree_.nodes().size() * 2 * bits_for(tree_.nodes().size() + 1));
  const std::uint64_t cells = c_cells_.size() + o_cells_.size() + e_cells_.size();
  s.add_bits("apexes", cells * 3 * coord);
  s.add_bits("run cutting offsets", pairs_.size() * 4 * bits_for(cells + 1));

  std::uint64_t loc = 0;
  for (const auto& l : c_locators_) loc += l.entries() * bits_for(l.size() + 1);
  s.add_bits("C locators", loc);

  std::uint64_t orders = 0, cont = 0, slots = 0, dom = 0, fences = 0;
  for (std::uint32_t ci = 0; ci < c_cells_.size(); ++ci) {
    const CellRec& c = c_cells_[ci];
    orders += c.size * 2 * bits_for(c.size);
    if (c_cont_[ci] == kNoIndex) {
      slots += c.size * coord;
    } else {
      cont += bits_for(pairs_[c_pair_[ci]].o_count);
      slots += c.size * bits_for(o_cells_[c_cont_[ci]].size);
    }
    dom += c_dom_[ci].design_bits();
    for (int a = 0; a < 3; ++a) fences += c_pred_[3 * ci + a].fences().size() * coord;
  }
  s.add_bits("C orders", orders);
  s.add_bits("C cont", cont);
  s.add_bits("C to overlay ranks", slots);
  s.add_bits("small_dom", dom);
  s.add_bits("predecessor fences", fences);

  std::uint64_t o2e = 0;
  for (const CellRec& oc : o_cells_) {
    std::uint32_t lo = kNoIndex, hi = 0, size_max = 0;
    for (std::uint32_t k = 0; k < oc.size; ++k) {
      const std::uint32_t ec = o_ecell_[oc.begin + k];
      if (ec == kNoIndex) continue;
      lo = std::min(lo, ec);
      hi = std::max(hi, ec);
      size_max = std::max(size_max, e_cells_[ec].size);
    }
    const std::uint64_t count = lo == kNoIndex ? 0 : hi - lo + 1;
    o2e += oc.size * (1 + bits_for(count) + bits_for(size_max));
  }
  s.add_bits("overlay to inner", o2e);

  std::uint64_t emem = 0, etargets = 0;
  for (std::uint32_t k = 0; k < e_cells_.size(); ++k) {
    const CellRec& e = e_cells_[k];
    const std::uint32_t tb = e_tbegin_[k], te = e_tbegin_[k + 1];
    std::uint32_t target_max = 0;
    for (std::uint32_t t = tb; t < te; ++t) {
      if (e_targets_[t].cell != kNoIndex) target_max = std::max(target_max, o_cells_[e_targets_[t].cell].size);
    }
    emem += e.size * (bits_for(te - tb) + bits_for(target_max));
    etargets += (te - tb) * (bits_for(tree_.nodes().size()) + bits_for(o_cells_.size() + 1));
  }
  s.add_bits("inner members", emem);
  s.add_bits("inner jump targets", etargets);

  auto bytes = [](const auto& v) { return static_cast<std::uint64_t>(v.capacity() * sizeof(v[0])); };
  s.add_bytes("leaves", bytes(leaves_));
  s.add_bytes("tree", bytes(tree_.nodes()) + bytes(nodes_) + bytes(pairs_));
  std::uint64_t lb = 0;
  for (const auto& l : c_locators_) lb += l.physical_bytes();
  s.add_bytes("C locators", lb);
  s.add_bytes("C cells", bytes(c_cells_) + bytes(c_pair_) + bytes(c_cont_) + bytes(c_slot_) + bytes(c_yord_) +
                             bytes(c_zord_));
  std::uint64_t db = 0, pb = 0;
  for (const auto& d : c_dom_) db += d.physical_bytes();
  for (const auto& p : c_pred_) pb += p.physical_bytes();
  s.add_bytes("small_dom", db);
  s.add_bytes("predecessor fences", pb);
  s.add_bytes("overlay cells", bytes(o_cells_) + bytes(o_ecell_) + bytes(o_eslot_) + bytes(e_cells_) +
                                   bytes(e_pair_) + bytes(e_target_) + bytes(e_slot_) + bytes(e_tbegin_) +
                                   bytes(e_targets_));
}

}  // namespace rrk
