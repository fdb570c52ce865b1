#include <algorithm>
#include <random>

#include "doctest.h"
#include "rrk/small_dom.hpp"

using namespace rrk;

namespace {

std::vector<Point3> permutation_set(std::mt19937_64& rng, std::size_t m) {
  std::vector<Coord> x(m), y(m), z(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = y[i] = z[i] = Coord(i + 1);
  std::shuffle(x.begin(), x.end(), rng);
  std::shuffle(y.begin(), y.end(), rng);
  std::shuffle(z.begin(), z.end(), rng);
  std::vector<Point3> s(m);
  for (std::size_t i = 0; i < m; ++i) s[i] = {x[i], y[i], z[i]};
  return s;
}

std::vector<std::uint32_t> brute(const std::vector<Point3>& s, const DominanceBox3& q) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < s.size(); ++i) {
    if (in_box(q, s[i])) out.push_back(i);
  }
  return out;
}

std::vector<std::uint32_t> run(const SmallDom& sd, const DominanceBox3& q, SmallDomCounters* c = nullptr) {
  std::vector<std::uint32_t> out;
  sd.query(q, out, c);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("one point is a base case") {
  std::vector<Point3> s{{1, 1, 1}};
  SmallDom sd(s);
  CHECK(sd.depth() == 0);
  CHECK(sd.audit());
  CHECK(run(sd, {1, 1, 1}) == std::vector<std::uint32_t>{0});
  CHECK(run(sd, {0, 1, 1}).empty());
}

TEST_CASE("25 points with t'=25 use one 5x5 level") {
  std::mt19937_64 rng(25);
  auto s = permutation_set(rng, 25);
  SmallDomConfig cfg;
  cfg.t_prime = 25;
  cfg.base_threshold = 5;
  SmallDom sd(s, cfg);
  CHECK(sd.depth() == 1);
  std::string why;
  CHECK_MESSAGE(sd.audit(&why), why);
  // column x in [6, 10] restricted to rows y <= 5
  std::vector<std::uint32_t> want;
  for (std::uint32_t i = 0; i < 25; ++i) {
    if (s[i].x <= 10 && s[i].y <= 5) want.push_back(i);
  }
  CHECK(run(sd, {10, 5, 25}) == want);
}

TEST_CASE("empty set") {
  SmallDom sd(std::vector<Point3>{});
  CHECK(sd.audit());
  CHECK(run(sd, {5, 5, 5}).empty());
  CHECK_FALSE(sd.any({5, 5, 5}));
}

TEST_CASE("full and empty queries") {
  std::mt19937_64 rng(1);
  auto s = permutation_set(rng, 300);
  SmallDom sd(s);
  CHECK(run(sd, {300, 300, 300}).size() == 300);
  CHECK(run(sd, {1000, 1000, 1000}).size() == 300);
  CHECK(run(sd, {0, 0, 0}).empty());
  CHECK(run(sd, {300, 300, 0}).empty());
}

TEST_CASE("exhaustive corner queries on small sets") {
  std::mt19937_64 rng(30);
  for (std::size_t m = 1; m <= 30; ++m) {
    auto s = permutation_set(rng, m);
    SmallDomConfig cfg;
    cfg.base_threshold = 2 + m % 5;
    SmallDom sd(s, cfg);
    REQUIRE(sd.audit());
    const Coord hi = Coord(m);
    for (Coord a = 0; a <= hi; ++a) {
      for (Coord b = 0; b <= hi; ++b) {
        for (Coord c = 0; c <= hi; ++c) {
          const DominanceBox3 q{a, b, c};
          auto want = brute(s, q);
          CHECK(run(sd, q) == want);
          CHECK(sd.any(q) == !want.empty());
        }
      }
    }
  }
}

TEST_CASE("random sets against brute force with work bound") {
  std::mt19937_64 rng(77);
  for (int round = 0; round < 60; ++round) {
    const std::size_t m = 1 + rng() % 1024;
    auto s = permutation_set(rng, m);
    SmallDom sd(s);
    std::string why;
    REQUIRE_MESSAGE(sd.audit(&why), why);
    CHECK(sd.depth() <= 5);
    std::uniform_int_distribution<Coord> d(0, Coord(m + 1));
    for (int i = 0; i < 200; ++i) {
      const DominanceBox3 q{d(rng), d(rng), d(rng)};
      SmallDomCounters cnt;
      auto got = run(sd, q, &cnt);
      CHECK(got == brute(s, q));
      CHECK(cnt.reported == got.size());
      CHECK(cnt.touched <= 64 * (got.size() + 1));
    }
  }
}

TEST_CASE("non-permutation input") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<Coord> d(-3, 12);
  std::vector<Point3> s(200);
  for (auto& p : s) p = {d(rng), d(rng), d(rng)};
  SmallDom sd(s);
  CHECK(sd.audit());
  for (Coord a = -4; a <= 13; ++a) {
    for (Coord b = -4; b <= 13; b += 2) {
      for (Coord c = -4; c <= 13; c += 3) CHECK(run(sd, {a, b, c}) == brute(s, {a, b, c}));
    }
  }
}

TEST_CASE("reported entries satisfy the z bound") {
  std::mt19937_64 rng(9);
  auto s = permutation_set(rng, 700);
  SmallDom sd(s);
  std::uniform_int_distribution<Coord> d(1, 700);
  for (int i = 0; i < 500; ++i) {
    const DominanceBox3 q{d(rng), d(rng), d(rng)};
    for (auto p : run(sd, q)) CHECK(s[p].z <= q.c);
  }
}
