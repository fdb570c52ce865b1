#include <algorithm>
#include <random>

#include "doctest.h"
#include "rrk/cutting.hpp"

using namespace rrk;

namespace {

std::vector<Point3> random_set(std::mt19937_64& rng, std::size_t n, bool permutation) {
  std::vector<Point3> s(n);
  if (permutation) {
    std::vector<Coord> a(n), b(n), c(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = b[i] = c[i] = Coord(i + 1);
    std::shuffle(b.begin(), b.end(), rng);
    std::shuffle(c.begin(), c.end(), rng);
    for (std::size_t i = 0; i < n; ++i) s[i] = {a[i], b[i], c[i]};
    std::shuffle(s.begin(), s.end(), rng);
  } else {
    std::uniform_int_distribution<Coord> d(1, Coord(std::max<std::size_t>(2, n / 4)));
    for (auto& p : s) p = {d(rng), d(rng), d(rng)};
  }
  return s;
}

std::vector<Point3> diagonal(int n) {
  std::vector<Point3> s;
  for (int i = 1; i <= n; ++i) s.push_back({i, i, i});
  return s;
}

Cell make_cell(std::span<const Point3> set, Point3 apex) {
  Cell c;
  c.apex = apex;
  for (std::uint32_t p = 0; p < set.size(); ++p) {
    if (dominates(apex, set[p])) c.members.push_back(p);
  }
  std::sort(c.members.begin(), c.members.end(), [&](auto a, auto b) { return set[a].x < set[b].x; });
  const std::size_t k = c.members.size();
  c.local.resize(k);
  c.y_order.resize(k);
  c.z_order.resize(k);
  for (std::uint32_t s = 0; s < k; ++s) c.y_order[s] = c.z_order[s] = s;
  std::sort(c.y_order.begin(), c.y_order.end(), [&](auto a, auto b) { return set[c.members[a]].y < set[c.members[b]].y; });
  std::sort(c.z_order.begin(), c.z_order.end(), [&](auto a, auto b) { return set[c.members[a]].z < set[c.members[b]].z; });
  for (std::uint32_t s = 0; s < k; ++s) {
    c.local[s].x = Coord(s + 1);
    c.local[c.y_order[s]].y = Coord(s + 1);
    c.local[c.z_order[s]].z = Coord(s + 1);
  }
  return c;
}

Cutting hand_cutting(std::span<const Point3> set, std::size_t t, Point3 bound, const std::vector<Point3>& apexes) {
  Cutting cut;
  cut.t = t;
  cut.bound = bound;
  cut.set_size = set.size();
  for (const auto& a : apexes) cut.cells.push_back(make_cell(set, a));
  std::vector<Point3> ap(apexes);
  cut.locator = ApexLocator(ap);
  return cut;
}

}  // namespace

TEST_CASE("single point") {
  std::vector<Point3> s{{1, 1, 1}};
  auto cut = build_cutting(s, 1);
  REQUIRE(cut.size() == 1);
  CHECK(cut.cells[0].members == std::vector<std::uint32_t>{0});
  CHECK(verify_cutting(s, 1, cut).ok);
}

TEST_CASE("diagonal t=1") {
  auto s = diagonal(4);
  auto cut = build_cutting(s, 1);
  auto rep = verify_cutting(s, 1, cut);
  CHECK(rep.ok);
  for (const auto& cell : cut.cells) CHECK(level(cell.apex, s) <= 2);

  // The hand-written cutting from the spec is valid as well.
  auto hand = hand_cutting(s, 1, {4, 4, 4}, {{2, 4, 4}, {4, 2, 4}, {4, 4, 2}});
  CHECK(verify_cutting(s, 1, hand).ok);

  SUBCASE("locate") {
    const Cell* c = locate_cell(cut, {1, 3, 2});
    REQUIRE(c != nullptr);
    CHECK(dominates(c->apex, Point3{1, 3, 2}));
    CHECK(locate_cell(cut, {4, 4, 4}) == nullptr);
    CHECK(level(Point3{4, 4, 4}, s) > 2);
    CHECK(locate_cell(cut, {0, 0, 0}) != nullptr);
    CHECK(locate_cell(cut, {-1, 5, 5}) != nullptr);
  }
}

TEST_CASE("t >= n gives one cell") {
  std::mt19937_64 rng(3);
  auto s = random_set(rng, 40, true);
  auto cut = build_cutting(s, 40);
  CHECK(cut.size() == 1);
  CHECK(cut.cells[0].size() == 40);
  CHECK(verify_cutting(s, 40, cut).ok);
}

TEST_CASE("planted violations are reported") {
  auto s = diagonal(4);
  SUBCASE("missing coverage") {
    auto bad = hand_cutting(s, 1, {4, 4, 4}, {{2, 4, 4}, {4, 2, 4}});
    auto rep = verify_cutting(s, 1, bad);
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.witness_point.has_value());
    CHECK(level(*rep.witness_point, s) <= 1);
  }
  SUBCASE("overfull cell") {
    auto bad = hand_cutting(s, 1, {4, 4, 4}, {{2, 4, 4}, {4, 2, 4}, {4, 4, 2}, {3, 3, 3}});
    auto rep = verify_cutting(s, 1, bad);
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.witness_cell.has_value());
    CHECK(*rep.witness_cell == 3);
  }
  SUBCASE("wrong members") {
    auto bad = hand_cutting(s, 1, {4, 4, 4}, {{2, 4, 4}, {4, 2, 4}, {4, 4, 2}});
    bad.cells[1].members.pop_back();
    CHECK_FALSE(verify_cutting(s, 1, bad).ok);
  }
}

TEST_CASE("random cuttings verify exhaustively") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 30; ++round) {
    const std::size_t n = 1 + rng() % 300;
    auto s = random_set(rng, n, round % 3 != 0);
    for (std::size_t t : {1, 4, 16, 64}) {
      auto cut = build_cutting(s, t);
      auto rep = verify_cutting(s, t, cut);
      INFO("n=" << n << " t=" << t << " " << (rep.violations.empty() ? "" : rep.violations.front()));
      CHECK(rep.ok);
    }
  }
}

TEST_CASE("64 random points t=8") {
  std::mt19937_64 rng(64);
  auto s = random_set(rng, 64, true);
  auto cut = build_cutting(s, 8);
  CHECK(verify_cutting(s, 8, cut).ok);
  CHECK(double(cut.size()) <= kDefaultSizeConstant * 8 + 1);
}

TEST_CASE("locate is sound and complete") {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 10; ++round) {
    const std::size_t n = 50 + rng() % 400;
    auto s = random_set(rng, n, true);
    const std::size_t t = 1 + rng() % 40;
    auto cut = build_cutting(s, t);
    std::uniform_int_distribution<Coord> d(-1, Coord(n + 2));
    for (int i = 0; i < 3000; ++i) {
      Point3 q{d(rng), d(rng), d(rng)};
      const Cell* c = locate_cell(cut, q);
      if (c == nullptr) {
        CHECK(level(q, s) > t);
      } else if (q.x >= 0 && q.y >= 0 && q.z >= 0) {
        CHECK(dominates(c->apex, componentwise_min(q, cut.bound)));
      }
    }
  }
}

TEST_CASE("locator against linear scan above the scan threshold") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<Coord> d(0, 1000);
  std::vector<Point3> apexes(500);
  for (auto& a : apexes) a = {d(rng), d(rng), d(rng)};
  ApexLocator loc(apexes);
  for (int i = 0; i < 20000; ++i) {
    Point3 q{d(rng), d(rng), d(rng)};
    bool any = std::any_of(apexes.begin(), apexes.end(), [&](const Point3& a) { return dominates(a, q); });
    auto hit = loc.locate(q);
    CHECK(any == hit.has_value());
    if (hit) CHECK(dominates(apexes[*hit], q));
  }
}

TEST_CASE("cell local ranks reproduce original orders") {
  std::mt19937_64 rng(8);
  auto s = random_set(rng, 400, false);
  auto cut = build_cutting(s, 16);
  for (const auto& cell : cut.cells) {
    for (std::size_t a = 0; a < cell.size(); ++a) {
      for (std::size_t b = 0; b < cell.size(); ++b) {
        const auto& p = s[cell.members[a]];
        const auto& q = s[cell.members[b]];
        if (p.x < q.x) CHECK(cell.local[a].x < cell.local[b].x);
        if (p.y < q.y) CHECK(cell.local[a].y < cell.local[b].y);
        if (p.z < q.z) CHECK(cell.local[a].z < cell.local[b].z);
      }
    }
  }
}

TEST_CASE("containing_cell_map") {
  std::mt19937_64 rng(21);
  SUBCASE("identity") {
    auto s = random_set(rng, 200, true);
    auto cut = build_cutting(s, 8);
    auto map = containing_cell_map(cut, cut);
    for (std::size_t c = 0; c < map.size(); ++c) {
      CHECK(dominates(cut.cells[map[c]].apex, cut.cells[c].apex));
    }
  }
  SUBCASE("t against 4t over the same set") {
    for (int round = 0; round < 20; ++round) {
      auto s = random_set(rng, 100 + rng() % 400, round % 2 == 0);
      const std::size_t t = 1 + rng() % 20;
      auto inner = build_cutting(s, t);
      auto outer = build_cutting(s, 4 * t);
      auto map = containing_cell_map(inner, outer);
      for (std::size_t c = 0; c < map.size(); ++c) {
        CHECK(dominates(outer.cells[map[c]].apex, inner.cells[c].apex));
      }
    }
  }
  SUBCASE("subset outer set") {
    // inner: f-cutting of S, outer: f'-cutting of S' subset of S, f' >= 2f
    for (int round = 0; round < 20; ++round) {
      const std::size_t n = 100 + rng() % 400;
      auto s = random_set(rng, n, true);
      std::vector<Point3> sub;
      for (const auto& p : s) {
        if (rng() % 3) sub.push_back(p);
      }
      const std::size_t f = 1 + rng() % 16;
      auto inner = build_cutting(s, f, {Point3{Coord(n), Coord(n), Coord(n)}});
      auto outer = build_cutting(sub, 2 * f + rng() % 3, {Point3{Coord(n), Coord(n), Coord(n)}});
      CHECK_NOTHROW(containing_cell_map(inner, outer));
    }
  }
  SUBCASE("failure is loud") {
    auto s = diagonal(4);
    auto inner = build_cutting(s, 2);
    auto outer = hand_cutting(s, 1, {4, 4, 4}, {{1, 1, 1}});
    CHECK_THROWS_AS(containing_cell_map(inner, outer), std::logic_error);
  }
}

TEST_CASE("sweep on tied classes") {
  std::vector<Point3> s{{1, 1, 1}, {1, 1, 1}, {1, 2, 1}, {2, 1, 1}, {2, 2, 2}};
  for (std::size_t t : {1, 2, 3}) {
    auto cut = build_cutting(s, t);
    CHECK(verify_cutting(s, t, cut).ok);
  }
}
