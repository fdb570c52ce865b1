#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "rrk/fast_index.hpp"
#include "rrk/linear_index.hpp"
#include "rrk/oracle.hpp"

using namespace rrk;

namespace {

std::vector<Point4> random_points(std::size_t n, std::mt19937_64& rng) {
  std::vector<Coord> perm[4];
  for (auto& p : perm) {
    p.resize(n);
    std::iota(p.begin(), p.end(), 1);
    std::shuffle(p.begin(), p.end(), rng);
  }
  std::vector<Point4> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = {perm[0][i], perm[1][i], perm[2][i], perm[3][i], static_cast<PointId>(i)};
  }
  return pts;
}

Query5 random_query(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<Coord> d(0, static_cast<Coord>(n) + 1);
  Coord lo = d(rng), hi = d(rng);
  if (lo > hi) std::swap(lo, hi);
  return {{d(rng), d(rng), d(rng)}, lo, hi};
}

}  // namespace

TEST_CASE("single point") {
  const std::vector<Point4> pts = {{1, 1, 1, 1, 3}};
  const auto ix = FastIndex::build(pts);
  CHECK(ix.query({{1, 1, 1}, 1, 1}) == std::vector<PointId>{3});
  CHECK(ix.query({{1, 0, 1}, 1, 1}).empty());
  CHECK(ix.any({{1, 1, 1}, 0, 2}));
  CHECK(ix.audit().ok());
}

TEST_CASE("empty and full queries") {
  std::mt19937_64 rng(2);
  const auto pts = random_points(300, rng);
  const auto ix = FastIndex::build(pts, {.rho = 4, .t0 = 8});
  CHECK(ix.query({{300, 300, 300}, 1, 300}).size() == 300);
  CHECK(ix.query({{0, 300, 300}, 1, 300}).empty());
  CHECK(ix.query({{300, 300, 300}, 301, 301}).empty());
  CHECK(ix.query({{300, 300, 300}, 5, 4}).empty());
}

TEST_CASE("pair cuttings of n=64, rho=4 pass verify_cutting") {
  std::mt19937_64 rng(4);
  const auto pts = random_points(64, rng);
  const auto ix = FastIndex::build(pts, {.rho = 4, .t0 = 4});
  const auto& tree = ix.tree();
  std::size_t checked = 0;
  for (std::uint32_t u = 0; u < tree.nodes().size(); ++u) {
    const auto& nd = tree.node(u);
    if (nd.leaf()) continue;
    for (std::uint32_t l = 0; l < nd.children; ++l) {
      for (std::uint32_t r = l; r < nd.children; ++r) {
        const auto [lo, hi] = ix.pair_leaves(u, l, r);
        std::vector<Point3> set;
        for (std::uint32_t g = lo; g < hi; ++g) set.push_back(ix.leaves()[g].xyz());
        const auto apexes = ix.pair_apexes(u, l, r);
        const auto cut = cutting_from_apexes(set, 4, apexes, {64, 64, 64});
        const auto rep = verify_cutting(set, 4, cut);
        for (const auto& v : rep.violations) INFO(v);
        CHECK(rep.ok);
        ++checked;
      }
    }
  }
  // root has 4 children: 10 runs, plus 10 for each internal child
  CHECK(checked >= 10);
}

TEST_CASE("random datasets agree with the oracle and the linear index") {
  std::mt19937_64 rng(17);
  for (std::size_t n : {2u, 5u, 17u, 100u, 256u, 900u}) {
    for (std::size_t rho : {2u, 3u, 4u}) {
      const auto pts = random_points(n, rng);
      const auto fast = FastIndex::build(pts, {.rho = rho, .t0 = 4});
      const auto lin = LinearIndex::build(pts, {.rho = rho, .t0 = 4});
      for (int q = 0; q < 200; ++q) {
        const auto query = random_query(n, rng);
        const auto want = oracle_report(pts, query);
        REQUIRE(fast.query(query) == want);
        REQUIRE(lin.query(query) == want);
        REQUIRE(fast.any(query) == !want.empty());
      }
    }
  }
}

TEST_CASE("audit: every stored point decodes within the hop bound") {
  std::mt19937_64 rng(6);
  for (std::size_t n : {64u, 500u, 4096u}) {
    const auto pts = random_points(n, rng);
    const auto ix = FastIndex::build(pts, {.rho = 2, .t0 = 4});
    const auto rep = ix.audit();
    for (const auto& f : rep.failures) INFO(f);
    CHECK(rep.ok());
    CHECK(rep.decode_hops_max <= ix.hop_bound());
    CHECK(rep.checks.at("decode round trip").total > 0);
  }
}

TEST_CASE("overlays exist on large subtrees and decoding uses them") {
  std::mt19937_64 rng(8);
  const auto pts = random_points(4096, rng);
  const auto ix = FastIndex::build(pts, {.rho = 2, .t0 = 4});
  CHECK(ix.has_overlay(ix.tree().root()));
  const auto rep = ix.audit();
  CHECK(rep.checks.count("inner cell jump targets") == 1);
  CHECK(rep.decode_hops_max >= 2);
}

TEST_CASE("point in a lazy node's cell decodes in one hop") {
  std::mt19937_64 rng(10);
  const auto pts = random_points(40, rng);
  const auto ix = FastIndex::build(pts, {.rho = 4, .t0 = 16});
  CHECK_FALSE(ix.has_overlay(ix.tree().root()));
  for (std::uint32_t ci = 0; ci < ix.c_cells(); ++ci) {
    std::size_t hops = 0;
    ix.decode({ix.c_cell(ci).node, CellKind::kC, ci, 0}, &hops);
    CHECK(hops == 1);
  }
}

TEST_CASE("hop histogram stays within the bound") {
  std::mt19937_64 rng(12);
  const auto pts = random_points(3000, rng);
  const auto ix = FastIndex::build(pts, {.rho = 3, .t0 = 4});
  QueryStats st;
  for (int i = 0; i < 200; ++i) ix.query(random_query(3000, rng), &st);
  CHECK(st.points_decoded > 0);
  CHECK(st.hop_histogram.size() <= ix.hop_bound() + 1);
}

TEST_CASE("predecessor accelerator agrees with plain binary search") {
  std::mt19937_64 rng(14);
  for (std::uint32_t step : {1u, 2u, 3u, 7u, 64u}) {
    for (int trial = 0; trial < 50; ++trial) {
      std::uniform_int_distribution<int> len(0, 80);
      std::vector<Coord> vals(len(rng));
      std::uniform_int_distribution<Coord> d(1, 200);
      for (auto& v : vals) v = d(rng);
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      const CellPredecessor pred(vals, step);
      auto at = [&](std::uint32_t i) { return vals[i]; };
      for (Coord b = 0; b <= 201; ++b) {
        REQUIRE(pred.count_le(b, at) == count_le_plain(static_cast<std::uint32_t>(vals.size()), b, at));
      }
    }
  }
}

TEST_CASE("query translation matches member counts") {
  std::mt19937_64 rng(15);
  const auto pts = random_points(700, rng);
  const auto ix = FastIndex::build(pts, {.rho = 4, .t0 = 8});
  for (std::uint32_t ci = 0; ci < ix.c_cells(); ci += 5) {
    const CellRec& c = ix.c_cell(ci);
    std::vector<Point4> members;
    for (std::uint32_t s = 0; s < c.size; ++s) members.push_back(ix.decode({c.node, CellKind::kC, ci, s}));
    const DominanceBox3 q{c.apex.x - 3, c.apex.y / 2, c.apex.z};
    const auto local = ix.translate_query_to_cell(ci, q);
    CHECK(local.a == std::count_if(members.begin(), members.end(), [&](const Point4& p) { return p.x <= q.a; }));
    CHECK(local.b == std::count_if(members.begin(), members.end(), [&](const Point4& p) { return p.y <= q.b; }));
    CHECK(local.c == std::count_if(members.begin(), members.end(), [&](const Point4& p) { return p.z <= q.c; }));
  }
}

TEST_CASE("canonical runs partition random ranges") {
  std::mt19937_64 rng(16);
  const auto pts = random_points(512, rng);
  const auto ix = FastIndex::build(pts, {.rho = 4, .t0 = 8});
  std::uniform_int_distribution<Coord> d(0, 513);
  for (int i = 0; i < 1000; ++i) {
    Coord lo = d(rng), hi = d(rng);
    if (lo > hi) std::swap(lo, hi);
    std::vector<int> hit(512, 0);
    const auto units = ix.canonical_pairs(lo, hi);
    for (const auto& u : units) {
      const auto& nd = ix.tree().node(u.node);
      const auto [a, b] = nd.leaf() ? std::pair{nd.lo, nd.hi} : ix.pair_leaves(u.node, u.l, u.r);
      for (std::uint32_t g = a; g < b; ++g) ++hit[g];
    }
    bool ok = units.size() <= 2 * ix.height() + 1;
    for (Coord w = 1; w <= 512; ++w) ok = ok && hit[w - 1] == ((w >= lo && w <= hi) ? 1 : 0);
    REQUIRE(ok);
  }
}
