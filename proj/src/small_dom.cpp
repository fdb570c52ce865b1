#include "rrk/small_dom.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rrk {

namespace {

std::uint64_t bits_for(std::uint64_t values) {
  // bits to store a value in [0, values)
  return values <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(values - 1));
}

}  // namespace

std::size_t SmallDomConfig::arity() const {
  const auto g = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(t_prime))));
  return std::clamp<std::size_t>(g, 2, 255);
}

SmallDom::SmallDom(std::span<const Point3> points, const SmallDomConfig& cfg) {
  if (points.size() > kMaxPoints) {
    throw std::invalid_argument("SmallDom: set too large");
  }
  arity_ = static_cast<std::uint32_t>(cfg.arity());
  base_ = static_cast<std::uint32_t>(std::max<std::size_t>(cfg.base_threshold, 1));
  const std::size_t m = points.size();
  coords_.resize(m);

  std::vector<std::uint32_t> order(m);
  auto rank_axis = [&](auto get, std::vector<Coord>& sorted, auto put) {
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return get(points[a]) < get(points[b]); });
    sorted.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
      sorted[r] = get(points[order[r]]);
      put(coords_[order[r]], static_cast<Slot>(r + 1));
    }
  };
  rank_axis([](const Point3& p) { return p.x; }, xs_, [](Coords& c, Slot v) { c.x = v; });
  rank_axis([](const Point3& p) { return p.y; }, ys_, [](Coords& c, Slot v) { c.y = v; });
  rank_axis([](const Point3& p) { return p.z; }, zs_, [](Coords& c, Slot v) { c.z = v; });

  // identity maps (the usual case for cell-local ranks) are not stored
  for (auto* v : {&xs_, &ys_, &zs_}) {
    bool identity = true;
    for (std::size_t r = 0; r < m && identity; ++r) identity = (*v)[r] == static_cast<Coord>(r + 1);
    if (identity) {
      v->clear();
      v->shrink_to_fit();
    }
  }

  if (m == 0) return;
  std::vector<Slot> all(m);
  std::iota(all.begin(), all.end(), Slot{0});
  build(all, 0);
}

std::uint32_t SmallDom::build(std::vector<Slot>& pts, std::uint32_t level) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  depth_ = std::max(depth_, level);
  auto by = [&](auto key) {
    std::sort(pts.begin(), pts.end(), [&](Slot a, Slot b) { return key(coords_[a]) < key(coords_[b]); });
  };

  if (pts.size() <= base_) {
    by([](const Coords& c) { return c.z; });
    Node& nd = nodes_[id];
    nd.items_begin = static_cast<std::uint32_t>(items_.size());
    items_.insert(items_.end(), pts.begin(), pts.end());
    nd.items_end = static_cast<std::uint32_t>(items_.size());
    return id;
  }

  const std::size_t m = pts.size();
  const std::size_t per = (m + arity_ - 1) / arity_;
  const std::size_t parts = (m + per - 1) / per;

  // column and row of every point
  std::vector<std::uint8_t> col(coords_.size()), row(coords_.size());
  std::vector<std::vector<Slot>> cols(parts), rows(parts);
  const auto split_begin = static_cast<std::uint32_t>(splits_.size());
  by([](const Coords& c) { return c.x; });
  for (std::size_t i = 0; i < m; ++i) {
    col[pts[i]] = static_cast<std::uint8_t>(i / per);
    cols[i / per].push_back(pts[i]);
    if (i % per == 0 && i > 0) splits_.push_back(coords_[pts[i]].x);
  }
  by([](const Coords& c) { return c.y; });
  for (std::size_t i = 0; i < m; ++i) {
    row[pts[i]] = static_cast<std::uint8_t>(i / per);
    rows[i / per].push_back(pts[i]);
    if (i % per == 0 && i > 0) splits_.push_back(coords_[pts[i]].y);
  }

  // meta lists, cell (i, j) at i * parts + j
  by([](const Coords& c) { return c.z; });
  std::vector<std::vector<Slot>> cell(parts * parts);
  for (Slot p : pts) cell[col[p] * parts + row[p]].push_back(p);
  const auto meta_begin = static_cast<std::uint32_t>(meta_z_.size());
  const auto items_begin = static_cast<std::uint32_t>(items_.size());
  for (const auto& list : cell) {
    meta_z_.push_back(list.empty() ? kEmptyZ : coords_[list.front()].z);
    meta_begin_.push_back(static_cast<std::uint32_t>(items_.size()));
    items_.insert(items_.end(), list.begin(), list.end());
  }

  {
    const Slot* z = meta_z_.data() + meta_begin;
    std::vector<Slot> part;
    auto push_stair = [&](std::vector<std::uint32_t>& range, bool use_y) {
      auto key = [&](Slot p) { return use_y ? coords_[p].y : coords_[p].x; };
      std::sort(part.begin(), part.end(), [&](Slot p, Slot q) { return key(p) < key(q); });
      range.push_back(static_cast<std::uint32_t>(stairs_.size()));
      Slot best = kEmptyZ;
      for (Slot p : part) {
        if (coords_[p].z < best) {
          best = coords_[p].z;
          stairs_.push_back(p);
        }
      }
      range.push_back(static_cast<std::uint32_t>(stairs_.size()));
    };
    for (std::size_t r = 0; r < parts; ++r) {
      for (std::size_t u = 0; u < parts; ++u) {
        Slot rect = kEmptyZ;
        for (std::size_t i = 0; i < r; ++i) {
          for (std::size_t j = 0; j < u; ++j) rect = std::min(rect, z[i * parts + j]);
        }
        rect_min_.push_back(rect);
        part.clear();
        for (std::size_t i = 0; i < r; ++i) {
          const auto& l = cell[i * parts + u];
          part.insert(part.end(), l.begin(), l.end());
        }
        push_stair(row_stair_, true);
        part.clear();
        for (std::size_t j = 0; j < u; ++j) {
          const auto& l = cell[r * parts + j];
          part.insert(part.end(), l.begin(), l.end());
        }
        push_stair(col_stair_, false);
      }
    }
  }

  const auto child_begin = static_cast<std::uint32_t>(children_.size());
  children_.resize(children_.size() + 2 * parts, kNone);
  {
    Node& nd = nodes_[id];
    nd.items_begin = items_begin;
    nd.items_end = static_cast<std::uint32_t>(items_.size());
    nd.split_begin = split_begin;
    nd.meta_begin = meta_begin;
    nd.child_begin = child_begin;
    nd.ncols = static_cast<std::uint8_t>(parts);
    nd.nrows = static_cast<std::uint8_t>(parts);
  }
  for (std::size_t i = 0; i < parts; ++i) {
    const auto c = build(cols[i], level + 1);
    children_[child_begin + i] = c;
  }
  for (std::size_t j = 0; j < parts; ++j) {
    const auto c = build(rows[j], level + 1);
    children_[child_begin + parts + j] = c;
  }
  return id;
}

bool SmallDom::stair_hit(const std::uint32_t* range, Slot first, Slot c, bool use_y, SmallDomCounters& cnt) const {
  // last staircase point with first coordinate <= `first` has the least z among them
  std::uint32_t lo = range[0], hi = range[1];
  ++cnt.touched;
  while (lo < hi) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    ++cnt.touched;
    const Coords& p = coords_[stairs_[mid]];
    if ((use_y ? p.y : p.x) <= first) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo > range[0] && coords_[stairs_[lo - 1]].z <= c;
}

template <typename Emit>
bool SmallDom::visit(std::uint32_t id, Slot a, Slot b, Slot c, Emit& emit, SmallDomCounters& cnt) const {
  const Node& nd = nodes_[id];
  if (nd.ncols == 0) {
    for (std::uint32_t k = nd.items_begin; k < nd.items_end; ++k) {
      ++cnt.touched;
      const Slot p = items_[k];
      const Coords& q = coords_[p];
      if (q.z > c) break;
      if (q.x <= a && q.y <= b && !emit(p)) return false;
    }
    return true;
  }

  const std::size_t nc = nd.ncols;
  const std::size_t nr = nd.nrows;
  const Slot* xsplit = splits_.data() + nd.split_begin;
  const Slot* ysplit = xsplit + (nc - 1);
  const auto r = static_cast<std::size_t>(std::upper_bound(xsplit, xsplit + nc - 1, a) - xsplit);
  const auto u = static_cast<std::size_t>(std::upper_bound(ysplit, ysplit + nr - 1, b) - ysplit);
  auto list_end = [&](std::size_t k) {
    return k + 1 < nc * nr ? meta_begin_[nd.meta_begin + k + 1] : nd.items_end;
  };

  const std::size_t at = nd.meta_begin + r * nr + u;

  // cells fully inside the x and y ranges
  ++cnt.touched;
  if (rect_min_[at] <= c) {
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < u; ++j) {
        const std::size_t k = i * nr + j;
        ++cnt.touched;
        if (meta_z_[nd.meta_begin + k] > c) continue;
        const std::uint32_t end = list_end(k);
        for (std::uint32_t e = meta_begin_[nd.meta_begin + k]; e < end; ++e) {
          ++cnt.touched;
          const Slot p = items_[e];
          if (coords_[p].z > c) break;
          if (!emit(p)) return false;
        }
      }
    }
  }

  // row u, columns before r: x is satisfied there
  if (r > 0 && stair_hit(row_stair_.data() + 2 * at, b, c, true, cnt)) {
    const Slot a2 = static_cast<Slot>(xsplit[r - 1] - 1);
    if (!visit(children_[nd.child_begin + nc + u], a2, b, c, emit, cnt)) return false;
  }
  // column r, rows up to u: y is satisfied below row u
  ++cnt.touched;
  const bool live = meta_z_[nd.meta_begin + r * nr + u] <= c || stair_hit(col_stair_.data() + 2 * at, a, c, false, cnt);
  if (live && !visit(children_[nd.child_begin + r], a, b, c, emit, cnt)) return false;
  return true;
}

namespace {

template <typename T>
std::size_t count_le(const std::vector<T>& sorted, Coord v, std::size_t m) {
  if (sorted.empty()) return static_cast<std::size_t>(std::clamp<std::int64_t>(v, 0, static_cast<std::int64_t>(m)));
  return static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
}

}  // namespace

void SmallDom::query(const DominanceBox3& q, std::vector<std::uint32_t>& out, SmallDomCounters* counters) const {
  SmallDomCounters local;
  SmallDomCounters& cnt = counters ? *counters : local;
  if (nodes_.empty()) return;
  const auto a = count_le(xs_, q.a, size()), b = count_le(ys_, q.b, size()), c = count_le(zs_, q.c, size());
  if (a == 0 || b == 0 || c == 0) return;
  auto emit = [&](Slot p) {
    out.push_back(p);
    ++cnt.reported;
    return true;
  };
  visit(0, static_cast<Slot>(a), static_cast<Slot>(b), static_cast<Slot>(c), emit, cnt);
}

bool SmallDom::any(const DominanceBox3& q) const {
  if (nodes_.empty()) return false;
  const auto a = count_le(xs_, q.a, size()), b = count_le(ys_, q.b, size()), c = count_le(zs_, q.c, size());
  if (a == 0 || b == 0 || c == 0) return false;
  bool found = false;
  auto emit = [&](Slot) {
    found = true;
    return false;
  };
  SmallDomCounters cnt;
  visit(0, static_cast<Slot>(a), static_cast<Slot>(b), static_cast<Slot>(c), emit, cnt);
  return found;
}

bool SmallDom::audit(std::string* why) const {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  const std::size_t m = coords_.size();
  if (m == 0) return nodes_.empty() ? true : fail("nodes without points");

  // Walk the node tree, recomputing each node's point set.
  struct Frame {
    std::uint32_t id;
    std::vector<Slot> pts;
  };
  std::vector<Slot> all(m);
  std::iota(all.begin(), all.end(), Slot{0});
  std::vector<Frame> stack{{0, all}};
  std::size_t seen_nodes = 0;
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    ++seen_nodes;
    const Node& nd = nodes_[f.id];
    std::sort(f.pts.begin(), f.pts.end());
    if (nd.ncols == 0) {
      if (f.pts.size() > base_) return fail("base case above threshold");
      std::vector<Slot> got(items_.begin() + nd.items_begin, items_.begin() + nd.items_end);
      if (!std::is_sorted(got.begin(), got.end(),
                          [&](Slot a, Slot b) { return coords_[a].z < coords_[b].z; })) {
        return fail("base list not sorted by z");
      }
      std::sort(got.begin(), got.end());
      if (got != f.pts) return fail("base list differs from node set");
      continue;
    }
    const std::size_t nc = nd.ncols, nr = nd.nrows;
    const std::size_t per = (f.pts.size() + arity_ - 1) / arity_;
    if (nc > arity_ || nr > arity_) return fail("arity exceeded");
    const Slot* xsplit = splits_.data() + nd.split_begin;
    const Slot* ysplit = xsplit + (nc - 1);
    std::vector<std::vector<Slot>> cols(nc), rows(nr);
    for (Slot p : f.pts) {
      const auto i = static_cast<std::size_t>(std::upper_bound(xsplit, xsplit + nc - 1, coords_[p].x) - xsplit);
      const auto j = static_cast<std::size_t>(std::upper_bound(ysplit, ysplit + nr - 1, coords_[p].y) - ysplit);
      cols[i].push_back(p);
      rows[j].push_back(p);
    }
    std::vector<Slot> from_lists;
    for (std::size_t i = 0; i < nc; ++i) {
      if (cols[i].size() > per || cols[i].empty()) return fail("column occupancy off");
      for (std::size_t j = 0; j < nr; ++j) {
        const std::size_t k = i * nr + j;
        const std::uint32_t begin = meta_begin_[nd.meta_begin + k];
        const std::uint32_t end = k + 1 < nc * nr ? meta_begin_[nd.meta_begin + k + 1] : nd.items_end;
        Slot zmin = kEmptyZ;
        for (std::uint32_t e = begin; e < end; ++e) {
          const Slot p = items_[e];
          if (e > begin && coords_[items_[e - 1]].z >= coords_[p].z) return fail("meta list not sorted by z");
          if (std::upper_bound(xsplit, xsplit + nc - 1, coords_[p].x) - xsplit != static_cast<std::ptrdiff_t>(i) ||
              std::upper_bound(ysplit, ysplit + nr - 1, coords_[p].y) - ysplit != static_cast<std::ptrdiff_t>(j)) {
            return fail("meta list entry in wrong cell");
          }
          zmin = std::min(zmin, coords_[p].z);
          from_lists.push_back(p);
        }
        if (meta_z_[nd.meta_begin + k] != zmin) return fail("meta z_min wrong");
      }
    }
    for (std::size_t r = 0; r < nc; ++r) {
      for (std::size_t u = 0; u < nr; ++u) {
        Slot rect = kEmptyZ;
        std::vector<std::pair<Slot, Slot>> rowpts, colpts;
        for (Slot p : f.pts) {
          const auto i = static_cast<std::size_t>(std::upper_bound(xsplit, xsplit + nc - 1, coords_[p].x) - xsplit);
          const auto j = static_cast<std::size_t>(std::upper_bound(ysplit, ysplit + nr - 1, coords_[p].y) - ysplit);
          if (i < r && j < u) rect = std::min(rect, coords_[p].z);
          if (i < r && j == u) rowpts.push_back({coords_[p].y, coords_[p].z});
          if (i == r && j < u) colpts.push_back({coords_[p].x, coords_[p].z});
        }
        const std::size_t at = nd.meta_begin + r * nr + u;
        if (rect_min_[at] != rect) return fail("rectangle minimum wrong");
        auto check = [&](std::vector<std::pair<Slot, Slot>>& pts, const std::uint32_t* range, bool use_y) {
          std::sort(pts.begin(), pts.end());
          std::vector<std::pair<Slot, Slot>> want;
          for (auto [f1, z] : pts) {
            if (want.empty() || z < want.back().second) want.push_back({f1, z});
          }
          std::vector<std::pair<Slot, Slot>> got;
          for (std::uint32_t e = range[0]; e < range[1]; ++e) {
            const Coords& q = coords_[stairs_[e]];
            got.push_back({use_y ? q.y : q.x, q.z});
          }
          return got == want;
        };
        if (!check(rowpts, row_stair_.data() + 2 * at, true)) return fail("row staircase wrong");
        if (!check(colpts, col_stair_.data() + 2 * at, false)) return fail("column staircase wrong");
      }
    }
    for (std::size_t j = 0; j < nr; ++j) {
      if (rows[j].size() > per || rows[j].empty()) return fail("row occupancy off");
    }
    std::sort(from_lists.begin(), from_lists.end());
    if (from_lists != f.pts) return fail("meta lists do not partition the node");
    for (std::size_t i = 0; i < nc; ++i) stack.push_back({children_[nd.child_begin + i], std::move(cols[i])});
    for (std::size_t j = 0; j < nr; ++j) stack.push_back({children_[nd.child_begin + nc + j], std::move(rows[j])});
  }
  if (seen_nodes != nodes_.size()) return fail("unreachable nodes");
  return true;
}

std::uint64_t SmallDom::design_bits() const {
  const std::uint64_t m = coords_.size();
  const std::uint64_t w = bits_for(m + 1);
  const std::uint64_t off = bits_for(items_.size() + 1);
  const std::uint64_t ptr = bits_for(nodes_.size() + 1);
  return 3 * w * m                           // coordinates
         + w * items_.size()                 // meta and base lists
         + (2 * w + 5 * off) * meta_z_.size() // meta z minima, list and staircase offsets
         + w * stairs_.size()                // staircases
         + w * splits_.size()                // column and row boundaries
         + ptr * children_.size()            // child links
         + nodes_.size() * (2 * off + 2 * bits_for(arity_ + 1));
}

std::uint64_t SmallDom::physical_bytes() const {
  return sizeof(*this) + (xs_.capacity() + ys_.capacity() + zs_.capacity()) * sizeof(Coord) +
         coords_.capacity() * sizeof(Coords) + nodes_.capacity() * sizeof(Node) +
         (splits_.capacity() + 2 * meta_z_.capacity() + stairs_.capacity() + items_.capacity()) * sizeof(Slot) +
         (meta_begin_.capacity() + row_stair_.capacity() + col_stair_.capacity() + children_.capacity()) * sizeof(std::uint32_t);
}

}  // namespace rrk
