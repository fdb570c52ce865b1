#include "rrk/cutting.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rrk {

namespace {

inline std::uint32_t lowbit(std::uint32_t i) { return i & (~i + 1); }

// Dynamic 2D dominance counting over class indices: counts active points with
// xr <= i and yr <= j. A Fenwick tree over xr whose nodes hold their points'
// yr values sorted, each with its own Fenwick tree of active flags.
class DominanceCounter2D {
 public:
  DominanceCounter2D(std::span<const std::uint32_t> xr, std::span<const std::uint32_t> yr, std::uint32_t mx)
      : mx_(mx), begin_(mx + 2, 0) {
    for (std::size_t p = 0; p < xr.size(); ++p) {
      for (std::uint32_t i = xr[p]; i <= mx_; i += lowbit(i)) ++begin_[i + 1];
    }
    for (std::uint32_t i = 1; i <= mx_ + 1; ++i) begin_[i] += begin_[i - 1];
    ys_.resize(begin_[mx_ + 1]);
    std::vector<std::uint32_t> fill(begin_.begin(), begin_.end() - 1);
    for (std::size_t p = 0; p < xr.size(); ++p) {
      for (std::uint32_t i = xr[p]; i <= mx_; i += lowbit(i)) ys_[fill[i]++] = yr[p];
    }
    bit_.resize(ys_.size());
    for (std::uint32_t i = 1; i <= mx_; ++i) {
      std::sort(ys_.begin() + begin_[i], ys_.begin() + begin_[i + 1]);
      const std::uint32_t len = begin_[i + 1] - begin_[i];
      for (std::uint32_t k = 1; k <= len; ++k) bit_[begin_[i] + k - 1] = static_cast<std::int32_t>(lowbit(k));
    }
  }

  std::int32_t count(std::uint32_t i, std::uint32_t j) const {
    std::int32_t total = 0;
    for (i = std::min(i, mx_); i > 0; i -= lowbit(i)) {
      const auto first = ys_.begin() + begin_[i];
      const auto last = ys_.begin() + begin_[i + 1];
      auto pos = static_cast<std::uint32_t>(std::upper_bound(first, last, j) - first);
      const std::int32_t* b = bit_.data() + begin_[i];
      for (; pos > 0; pos -= lowbit(pos)) total += b[pos - 1];
    }
    return total;
  }

  void remove(std::uint32_t x, std::uint32_t y) {
    for (std::uint32_t i = x; i <= mx_; i += lowbit(i)) {
      const auto first = ys_.begin() + begin_[i];
      const auto last = ys_.begin() + begin_[i + 1];
      // Equal y values can repeat; any one of their slots works for counting.
      auto pos = static_cast<std::uint32_t>(std::lower_bound(first, last, y) - first) + 1;
      const auto len = static_cast<std::uint32_t>(last - first);
      std::int32_t* b = bit_.data() + begin_[i];
      while (pos <= len && prefix_at(b, pos) == prefix_at(b, pos - 1)) ++pos;
      for (; pos <= len; pos += lowbit(pos)) b[pos - 1] -= 1;
    }
  }

 private:
  static std::int32_t prefix_at(const std::int32_t* b, std::uint32_t pos) {
    std::int32_t s = 0;
    for (; pos > 0; pos -= lowbit(pos)) s += b[pos - 1];
    return s;
  }

  std::uint32_t mx_;
  std::vector<std::uint32_t> begin_;
  std::vector<std::uint32_t> ys_;
  std::vector<std::int32_t> bit_;
};

// Dense 1-based ranks of one coordinate plus the sorted distinct values.
struct AxisRanks {
  std::vector<std::uint32_t> rank;
  std::vector<Coord> values;

  // Top coordinate of class c: classes are [values[c-1], values[c] - 1], the
  // last one ends at the domain bound.
  Coord top(std::uint32_t c, Coord bound) const {
    return c < values.size() ? values[c] - 1 : bound;
  }
  std::uint32_t classes() const { return static_cast<std::uint32_t>(values.size()); }
};

template <typename Get>
AxisRanks dense_ranks(std::span<const Point3> set, Get get) {
  AxisRanks out;
  out.values.reserve(set.size());
  for (const auto& p : set) out.values.push_back(get(p));
  std::sort(out.values.begin(), out.values.end());
  out.values.erase(std::unique(out.values.begin(), out.values.end()), out.values.end());
  out.rank.reserve(set.size());
  for (const auto& p : set) {
    out.rank.push_back(static_cast<std::uint32_t>(
        std::lower_bound(out.values.begin(), out.values.end(), get(p)) - out.values.begin() + 1));
  }
  return out;
}

void fill_cell_locals(std::span<const Point3> set, Cell& cell) {
  auto& m = cell.members;
  std::sort(m.begin(), m.end(), [&](std::uint32_t a, std::uint32_t b) {
    return set[a].x != set[b].x ? set[a].x < set[b].x : a < b;
  });
  const std::size_t k = m.size();
  cell.local.assign(k, Point3{});
  cell.y_order.resize(k);
  cell.z_order.resize(k);
  std::iota(cell.y_order.begin(), cell.y_order.end(), 0u);
  std::iota(cell.z_order.begin(), cell.z_order.end(), 0u);
  std::sort(cell.y_order.begin(), cell.y_order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return set[m[a]].y != set[m[b]].y ? set[m[a]].y < set[m[b]].y : a < b;
  });
  std::sort(cell.z_order.begin(), cell.z_order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return set[m[a]].z != set[m[b]].z ? set[m[a]].z < set[m[b]].z : a < b;
  });
  for (std::size_t s = 0; s < k; ++s) {
    cell.local[s].x = static_cast<Coord>(s + 1);
    cell.local[cell.y_order[s]].y = static_cast<Coord>(s + 1);
    cell.local[cell.z_order[s]].z = static_cast<Coord>(s + 1);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Sweep

namespace detail {

std::vector<ClassApex> sweep_apexes(std::span<const std::uint32_t> xr, std::span<const std::uint32_t> yr,
                                    std::span<const std::uint32_t> zr, std::size_t t) {
  if (t == 0) throw std::invalid_argument("shallow cutting needs t >= 1");
  const std::size_t m = xr.size();
  const std::uint32_t mx = xr.empty() ? 0 : *std::max_element(xr.begin(), xr.end());
  const std::uint32_t my = yr.empty() ? 0 : *std::max_element(yr.begin(), yr.end());
  const std::uint32_t mz = zr.empty() ? 0 : *std::max_element(zr.begin(), zr.end());
  const auto lim_lo = static_cast<std::int32_t>(std::min<std::size_t>(t, m + 1));
  const auto lim_hi = static_cast<std::int32_t>(std::min<std::size_t>(2 * t, m + 1));

  DominanceCounter2D counter(xr, yr, mx);
  auto level = [&](std::uint32_t i, std::uint32_t j) { return counter.count(std::min(i, mx), std::min(j, my)); };

  // Points grouped by z class.
  std::vector<std::vector<std::uint32_t>> by_z(mz + 1);
  for (std::size_t p = 0; p < m; ++p) by_z[zr[p]].push_back(static_cast<std::uint32_t>(p));

  std::map<std::uint32_t, std::uint32_t> stair;  // i -> j, i increasing, j decreasing
  struct Witness {
    std::uint32_t j;
    std::int32_t level;
  };
  std::map<std::uint32_t, Witness> witnesses;  // keyed by i
  std::set<std::uint32_t> pending;

  auto add_witness = [&](std::uint32_t wi, std::uint32_t wj) {
    if (wi > mx || wj > my) return;
    const std::int32_t lv = level(wi, wj);
    witnesses[wi] = {wj, lv};
    if (lv <= lim_lo) pending.insert(wi);
  };

  // Largest i in [i0, mx] with level(i, j) <= lim; level(i0, j) <= lim holds.
  auto grow_x = [&](std::uint32_t i0, std::uint32_t j, std::int32_t lim) {
    std::uint32_t lo = i0, hi = mx;
    while (lo < hi) {
      const std::uint32_t mid = lo + (hi - lo + 1) / 2;
      if (level(mid, j) <= lim) lo = mid; else hi = mid - 1;
    }
    return lo;
  };
  auto grow_y = [&](std::uint32_t i, std::uint32_t j0, std::int32_t lim) {
    std::uint32_t lo = j0, hi = my;
    while (lo < hi) {
      const std::uint32_t mid = lo + (hi - lo + 1) / 2;
      if (level(i, mid) <= lim) lo = mid; else hi = mid - 1;
    }
    return lo;
  };

  // Grow along the diagonal first so the new apex keeps slack on both axes,
  // then extend x and y to the 2t limit.
  auto choose_apex = [&](std::uint32_t wi, std::uint32_t wj) {
    std::uint32_t lo = 0, hi = std::max(mx - wi, my - wj);
    auto diag = [&](std::uint32_t s) { return level(std::min(wi + s, mx), std::min(wj + s, my)); };
    while (lo < hi) {
      const std::uint32_t mid = lo + (hi - lo + 1) / 2;
      if (diag(mid) <= lim_hi) lo = mid; else hi = mid - 1;
    }
    std::uint32_t i = std::min(wi + lo, mx);
    std::uint32_t j = std::min(wj + lo, my);
    i = grow_x(i, j, lim_hi);
    j = grow_y(i, j, lim_hi);
    return std::pair{i, j};
  };

  auto insert_apex = [&](std::uint32_t i, std::uint32_t j) {
    auto it = stair.upper_bound(i);
    while (it != stair.begin()) {
      auto pv = std::prev(it);
      if (pv->second <= j) stair.erase(pv); else break;
    }
    const bool has_prev = it != stair.begin();
    const bool has_next = it != stair.end();
    const std::uint32_t lo = has_prev ? std::prev(it)->first + 1 : 0;
    const std::uint32_t hi = has_next ? it->first : mx + 1;
    const std::uint32_t next_j = has_next ? it->second + 1 : 0;
    witnesses.erase(witnesses.lower_bound(lo), witnesses.upper_bound(hi));
    stair[i] = j;
    add_witness(lo, j + 1);
    add_witness(i + 1, next_j);
  };

  std::vector<ClassApex> out;
  add_witness(0, 0);
  for (std::uint32_t k = mz;; --k) {
    while (!pending.empty()) {
      const std::uint32_t key = *pending.begin();
      pending.erase(pending.begin());
      auto it = witnesses.find(key);
      if (it == witnesses.end() || it->second.level > lim_lo) continue;
      const auto [i, j] = choose_apex(key, it->second.j);
      out.push_back({i, j, k});
      insert_apex(i, j);
    }
    if (k == 0) break;
    for (std::uint32_t p : by_z[k]) {
      counter.remove(xr[p], yr[p]);
      for (auto it = witnesses.lower_bound(xr[p]); it != witnesses.end() && it->second.j >= yr[p]; ++it) {
        if (--it->second.level <= lim_lo) pending.insert(it->first);
      }
    }
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Locator

ApexLocator::ApexLocator(std::span<const Point3> apexes) : apexes_(apexes.begin(), apexes.end()) {
  const std::size_t c = apexes_.size();
  by_x_.resize(c);
  std::iota(by_x_.begin(), by_x_.end(), 0u);
  std::sort(by_x_.begin(), by_x_.end(), [&](std::uint32_t a, std::uint32_t b) {
    return apexes_[a].x != apexes_[b].x ? apexes_[a].x < apexes_[b].x : a < b;
  });
  xs_.resize(c);
  for (std::size_t i = 0; i < c; ++i) xs_[i] = apexes_[by_x_[i]].x;
  if (c < kScanThreshold) return;

  leaves_ = 1;
  while (leaves_ < c) leaves_ <<= 1;
  std::vector<std::vector<Entry>> nodes(2 * leaves_);
  for (std::size_t i = 0; i < c; ++i) {
    const auto& a = apexes_[by_x_[i]];
    nodes[leaves_ + i].push_back({a.y, a.z, by_x_[i]});
  }
  for (std::size_t v = leaves_ - 1; v >= 1; --v) {
    auto& out = nodes[v];
    const auto& l = nodes[2 * v];
    const auto& r = nodes[2 * v + 1];
    out.resize(l.size() + r.size());
    std::merge(l.begin(), l.end(), r.begin(), r.end(), out.begin(),
               [](const Entry& a, const Entry& b) { return a.y > b.y; });
  }
  node_begin_.assign(2 * leaves_ + 1, 0);
  for (std::size_t v = 1; v < 2 * leaves_; ++v) node_begin_[v + 1] = node_begin_[v] + nodes[v].size();
  entries_.reserve(node_begin_[2 * leaves_]);
  for (std::size_t v = 1; v < 2 * leaves_; ++v) {
    auto& list = nodes[v];
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::uint32_t idx = list[k].argmax;
      const Coord z = apexes_[idx].z;
      if (k > 0 && list[k - 1].zmax >= z) {
        list[k].zmax = list[k - 1].zmax;
        list[k].argmax = list[k - 1].argmax;
      }
    }
    entries_.insert(entries_.end(), list.begin(), list.end());
  }
}

std::optional<std::uint32_t> ApexLocator::locate(const Point3& q) const {
  const std::size_t c = apexes_.size();
  const auto pos = static_cast<std::size_t>(std::lower_bound(xs_.begin(), xs_.end(), q.x) - xs_.begin());
  if (pos >= c) return std::nullopt;
  if (c < kScanThreshold) {
    for (std::size_t i = pos; i < c; ++i) {
      const auto& a = apexes_[by_x_[i]];
      if (a.y >= q.y && a.z >= q.z) return by_x_[i];
    }
    return std::nullopt;
  }
  auto probe = [&](std::size_t v) -> std::optional<std::uint32_t> {
    const Entry* first = entries_.data() + node_begin_[v];
    const Entry* last = entries_.data() + node_begin_[v + 1];
    // Entries are sorted by decreasing y; count those with y >= q.y.
    const Entry* end = std::partition_point(first, last, [&](const Entry& e) { return e.y >= q.y; });
    if (end == first) return std::nullopt;
    const Entry& best = *(end - 1);
    if (best.zmax >= q.z) return best.argmax;
    return std::nullopt;
  };
  std::size_t l = pos + leaves_;
  std::size_t r = c + leaves_;
  while (l < r) {
    if (l & 1) {
      if (auto hit = probe(l++)) return hit;
    }
    if (r & 1) {
      if (auto hit = probe(--r)) return hit;
    }
    l >>= 1;
    r >>= 1;
  }
  return std::nullopt;
}

std::uint64_t ApexLocator::physical_bytes() const {
  return apexes_.capacity() * sizeof(Point3) + by_x_.capacity() * sizeof(std::uint32_t) +
         xs_.capacity() * sizeof(Coord) + node_begin_.capacity() * sizeof(std::uint32_t) +
         entries_.capacity() * sizeof(Entry);
}

// ---------------------------------------------------------------------------
// Cutting

double Cutting::size_ratio() const {
  if (set_size == 0) return 0.0;
  return static_cast<double>(cells.size()) * static_cast<double>(t) / static_cast<double>(set_size);
}

Cutting build_cutting(std::span<const Point3> set, std::size_t t, const CuttingOptions& opts) {
  if (t == 0) throw std::invalid_argument("build_cutting: t must be >= 1");
  Point3 bound{0, 0, 0};
  for (const auto& p : set) {
    bound.x = std::max(bound.x, p.x);
    bound.y = std::max(bound.y, p.y);
    bound.z = std::max(bound.z, p.z);
  }
  if (opts.bound) {
    if (!dominates(*opts.bound, bound)) {
      throw std::invalid_argument("build_cutting: point outside the domain bound");
    }
    bound = *opts.bound;
  }

  const AxisRanks rx = dense_ranks(set, [](const Point3& p) { return p.x; });
  const AxisRanks ry = dense_ranks(set, [](const Point3& p) { return p.y; });
  const AxisRanks rz = dense_ranks(set, [](const Point3& p) { return p.z; });
  const auto apexes = detail::sweep_apexes(rx.rank, ry.rank, rz.rank, t);

  Cutting cut;
  cut.t = t;
  cut.bound = bound;
  cut.set_size = set.size();
  cut.cells.resize(apexes.size());

  // Members: scan along whichever axis has the shorter prefix.
  std::vector<std::uint32_t> by_x(set.size()), by_y(set.size());
  std::iota(by_x.begin(), by_x.end(), 0u);
  std::iota(by_y.begin(), by_y.end(), 0u);
  std::sort(by_x.begin(), by_x.end(), [&](std::uint32_t a, std::uint32_t b) { return rx.rank[a] < rx.rank[b]; });
  std::sort(by_y.begin(), by_y.end(), [&](std::uint32_t a, std::uint32_t b) { return ry.rank[a] < ry.rank[b]; });

  std::vector<Point3> apex_points(apexes.size());
  for (std::size_t c = 0; c < apexes.size(); ++c) {
    const auto& a = apexes[c];
    Cell& cell = cut.cells[c];
    cell.apex = {rx.top(a.i, bound.x), ry.top(a.j, bound.y), rz.top(a.k, bound.z)};
    apex_points[c] = cell.apex;
    const bool scan_x = a.i <= a.j;
    const auto& order = scan_x ? by_x : by_y;
    for (std::uint32_t p : order) {
      if ((scan_x ? rx.rank[p] : ry.rank[p]) > (scan_x ? a.i : a.j)) break;
      if (rx.rank[p] <= a.i && ry.rank[p] <= a.j && rz.rank[p] <= a.k) cell.members.push_back(p);
    }
    fill_cell_locals(set, cell);
  }
  cut.locator = ApexLocator(apex_points);
  return cut;
}

Cutting cutting_from_apexes(std::span<const Point3> set, std::size_t t, std::span<const Point3> apexes,
                            const Point3& bound) {
  Cutting cut;
  cut.t = t;
  cut.bound = bound;
  cut.set_size = set.size();
  cut.cells.resize(apexes.size());
  for (std::size_t c = 0; c < apexes.size(); ++c) {
    Cell& cell = cut.cells[c];
    cell.apex = apexes[c];
    for (std::uint32_t p = 0; p < set.size(); ++p) {
      if (dominates(cell.apex, set[p])) cell.members.push_back(p);
    }
    fill_cell_locals(set, cell);
  }
  cut.locator = ApexLocator(apexes);
  return cut;
}

std::optional<std::uint32_t> locate_cell_index(const Cutting& cut, const Point3& q) {
  if (q.x < 0 || q.y < 0 || q.z < 0) {
    // Nothing is dominated; any cell holds the (empty) answer.
    return cut.cells.empty() ? std::nullopt : std::optional<std::uint32_t>(0);
  }
  return cut.locator.locate(componentwise_min(q, cut.bound));
}

const Cell* locate_cell(const Cutting& cut, const Point3& q) {
  auto idx = locate_cell_index(cut, q);
  return idx ? &cut.cells[*idx] : nullptr;
}

// ---------------------------------------------------------------------------
// Verification

void CuttingReport::fail(std::string what) {
  ok = false;
  violations.push_back(std::move(what));
}

CuttingReport verify_cutting(std::span<const Point3> set, std::size_t t, const Cutting& cut, double c_size) {
  CuttingReport rep;
  const std::size_t n = set.size();
  const Point3 bound = cut.bound;
  auto fmt = [](const Point3& p) {
    std::ostringstream os;
    os << "(" << p.x << "," << p.y << "," << p.z << ")";
    return os.str();
  };

  for (const auto& p : set) {
    if (!dominates(bound, p)) {
      rep.fail("point " + fmt(p) + " outside domain bound " + fmt(bound));
      return rep;
    }
  }
  if (t == 0) {
    rep.fail("t must be >= 1");
    return rep;
  }

  // Size bound.
  const double limit = c_size * static_cast<double>(n) / static_cast<double>(t) + 1.0;
  if (static_cast<double>(cut.cells.size()) > limit) {
    std::ostringstream os;
    os << "size " << cut.cells.size() << " exceeds " << limit;
    rep.fail(os.str());
  }

  // Condition (ii) and member lists, by brute force per cell.
  for (std::size_t c = 0; c < cut.cells.size(); ++c) {
    const Cell& cell = cut.cells[c];
    if (!dominates(bound, cell.apex)) {
      rep.fail("cell " + std::to_string(c) + " apex outside domain");
      rep.witness_cell = c;
      continue;
    }
    std::vector<std::uint32_t> expect;
    for (std::uint32_t p = 0; p < n; ++p) {
      if (dominates(cell.apex, set[p])) expect.push_back(p);
    }
    if (expect.size() > 2 * t) {
      rep.fail("cell " + std::to_string(c) + " apex " + fmt(cell.apex) + " has level " +
               std::to_string(expect.size()) + " > 2t");
      rep.witness_cell = c;
      rep.witness_point = cell.apex;
    }
    std::vector<std::uint32_t> got = cell.members;
    std::sort(got.begin(), got.end());
    if (got != expect) {
      rep.fail("cell " + std::to_string(c) + " member list differs from the points under its apex");
      rep.witness_cell = c;
      continue;
    }
    const std::size_t k = cell.members.size();
    bool locals_ok = cell.local.size() == k && cell.y_order.size() == k && cell.z_order.size() == k;
    for (std::size_t s = 0; locals_ok && s + 1 < k; ++s) {
      const auto& a = set[cell.members[s]];
      const auto& b = set[cell.members[s + 1]];
      const auto& ya = set[cell.members[cell.y_order[s]]];
      const auto& yb = set[cell.members[cell.y_order[s + 1]]];
      const auto& za = set[cell.members[cell.z_order[s]]];
      const auto& zb = set[cell.members[cell.z_order[s + 1]]];
      locals_ok = a.x <= b.x && ya.y <= yb.y && za.z <= zb.z;
    }
    for (std::size_t s = 0; locals_ok && s < k; ++s) {
      locals_ok = cell.local[s].x == static_cast<Coord>(s + 1) &&
                  cell.local[cell.y_order[s]].y == static_cast<Coord>(s + 1) &&
                  cell.local[cell.z_order[s]].z == static_cast<Coord>(s + 1);
    }
    if (!locals_ok) {
      rep.fail("cell " + std::to_string(c) + " local rank space is inconsistent");
      rep.witness_cell = c;
    }
  }

  // Condition (i): for every (x class, y class) find the highest z class with
  // level <= t and check that its top corner is under some apex.
  const AxisRanks rx = dense_ranks(set, [](const Point3& p) { return p.x; });
  const AxisRanks ry = dense_ranks(set, [](const Point3& p) { return p.y; });
  const AxisRanks rz = dense_ranks(set, [](const Point3& p) { return p.z; });
  const std::uint32_t mx = rx.classes(), my = ry.classes(), mz = rz.classes();
  std::vector<std::vector<std::uint32_t>> by_y(my + 1);
  for (std::uint32_t p = 0; p < n; ++p) by_y[ry.rank[p]].push_back(p);
  std::vector<Coord> y_tops(my + 1);
  for (std::uint32_t j = 0; j <= my; ++j) y_tops[j] = ry.top(j, bound.y);

  std::vector<Coord> best_z(my + 2);
  for (std::uint32_t i = 0; i <= mx; ++i) {
    const Coord xtop = rx.top(i, bound.x);
    // best_z[j]: max apex z over apexes with x >= xtop and y >= top of class j.
    std::fill(best_z.begin(), best_z.end(), std::numeric_limits<Coord>::min());
    for (const Cell& cell : cut.cells) {
      if (cell.apex.x < xtop) continue;
      // Largest class j whose top is <= apex.y.
      auto it = std::upper_bound(y_tops.begin(), y_tops.end(), cell.apex.y);
      if (it == y_tops.begin()) continue;
      const auto j = static_cast<std::size_t>(it - y_tops.begin() - 1);
      best_z[j] = std::max(best_z[j], cell.apex.z);
    }
    for (std::size_t j = my; j-- > 0;) best_z[j] = std::max(best_z[j], best_z[j + 1]);

    std::priority_queue<std::uint32_t> smallest;  // t+1 smallest z ranks
    for (std::uint32_t j = 0; j <= my; ++j) {
      for (std::uint32_t p : by_y[j]) {
        if (rx.rank[p] > i) continue;
        smallest.push(rz.rank[p]);
        if (smallest.size() > t + 1) smallest.pop();
      }
      const std::uint32_t kmax = smallest.size() <= t ? mz : smallest.top() - 1;
      const Point3 corner{xtop, y_tops[j], rz.top(kmax, bound.z)};
      if (best_z[j] < corner.z) {
        rep.fail("grid point " + fmt(corner) + " has level <= t but lies in no cell");
        rep.witness_point = corner;
        return rep;
      }
    }
  }
  return rep;
}

std::vector<std::uint32_t> containing_cell_map(const Cutting& inner, const Cutting& outer) {
  std::vector<std::uint32_t> map(inner.cells.size());
  for (std::size_t c = 0; c < inner.cells.size(); ++c) {
    auto hit = locate_cell_index(outer, inner.cells[c].apex);
    if (!hit) {
      std::ostringstream os;
      const auto& a = inner.cells[c].apex;
      os << "containing_cell_map: no outer cell contains inner cell " << c << " with apex (" << a.x << ","
         << a.y << "," << a.z << ")";
      throw std::logic_error(os.str());
    }
    map[c] = *hit;
  }
  return map;
}

}  // namespace rrk
