#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "rrk/dataset.hpp"
#include "rrk/oracle.hpp"
#include "rrk/serialize.hpp"
#include "rrk/suite.hpp"

using namespace rrk;

TEST_CASE("diagonal dataset") {
  const auto ds = generate_dataset(DatasetKind::kDiagonal, 4, 0);
  REQUIRE(ds.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const double v = static_cast<double>(i + 1);
    CHECK(ds.raw[i].x == v);
    CHECK(ds.raw[i].y == v);
    CHECK(ds.raw[i].z == v);
    CHECK(ds.raw[i].w == v);
    CHECK(ds.raw[i].id == i + 1);
  }
}

TEST_CASE("generation is deterministic") {
  for (DatasetKind k : all_dataset_kinds()) {
    const auto a = generate_dataset(k, 1000, 7);
    const auto b = generate_dataset(k, 1000, 7);
    std::ostringstream sa, sb;
    write_points(sa, a.raw);
    write_points(sb, b.raw);
    CHECK(sa.str() == sb.str());
    CHECK(a.points == b.points);
  }
  CHECK_THROWS_AS(generate_dataset(DatasetKind::kUniform, 0, 1), std::invalid_argument);
  CHECK(dataset_kind_from_string("clustered") == DatasetKind::kClustered);
  CHECK_THROWS_AS(dataset_kind_from_string("gaussian"), std::invalid_argument);
}

TEST_CASE("adversarial duplicates tie at least half of the x values") {
  const auto ds = generate_dataset(DatasetKind::kAdversarialDuplicates, 1000, 3);
  std::multiset<double> xs;
  for (const auto& p : ds.raw) xs.insert(p.x);
  std::size_t tied = 0;
  for (const auto& p : ds.raw) tied += xs.count(p.x) > 1;
  CHECK(tied >= ds.size() / 2);
}

TEST_CASE("text formats round trip") {
  const auto ds = generate_dataset(DatasetKind::kUniform, 50, 11);
  std::stringstream ps;
  ps << "# generated\n\n";
  write_points(ps, ds.raw);
  const auto back = read_points(ps);
  REQUIRE(back.size() == ds.raw.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == ds.raw[i]);

  const auto qs = random_queries(ds, 30, 5);
  std::stringstream qss;
  write_queries(qss, qs);
  const auto qback = read_queries(qss);
  REQUIRE(qback.size() == qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) CHECK(qback[i] == qs[i]);

  std::stringstream rs;
  write_results(rs, {{1, 2, 3}, {}, {7}});
  CHECK(read_results(rs) == std::vector<std::vector<PointId>>{{1, 2, 3}, {}, {7}});
}

TEST_CASE("malformed text is reported with its line") {
  std::stringstream bad("1 2 3 4\n1 2 x 4\n");
  try {
    read_points(bad);
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::stringstream shortq("1 2 3 4\n");
  CHECK_THROWS_AS(read_queries(shortq), std::runtime_error);
}

TEST_CASE("serialization round trip keeps answers and space") {
  const auto ds = generate_dataset(DatasetKind::kClustered, 4096, 21);
  const auto queries = random_queries(ds, 100, 22);
  const auto lin = LinearIndex::build(ds.points);
  const auto fast = FastIndex::build(ds.points, {.rho = 4, .t0 = 16});

  std::stringstream ls, fs;
  write_index(ls, lin, &ds.dictionary);
  write_index(fs, fast);
  const auto lin2 = read_index(ls);
  const auto fast2 = read_index(fs);
  REQUIRE(lin2.linear);
  REQUIRE(fast2.fast);
  REQUIRE(lin2.dictionary);
  CHECK_FALSE(fast2.dictionary);
  CHECK(lin2.linear->space() == lin.space());
  CHECK(fast2.fast->space() == fast.space());
  for (const auto& rq : queries) {
    const Query5 q = query_to_rank_space(rq, ds.dictionary);
    CHECK(lin2.linear->query(q) == lin.query(q));
    CHECK(fast2.fast->query(q) == fast.query(q));
    CHECK(query_to_rank_space(rq, *lin2.dictionary) == q);
  }
}

TEST_CASE("corrupt files are classified") {
  const auto ds = generate_dataset(DatasetKind::kUniform, 200, 2);
  const auto lin = LinearIndex::build(ds.points);
  std::stringstream ss;
  write_index(ss, lin);
  const std::string good = ss.str();

  auto part_of = [](const std::string& bytes) {
    std::stringstream in(bytes);
    try {
      read_index(in);
    } catch (const FormatError& e) {
      return e.part() == FormatError::Part::kHeader ? std::string("header") : std::string("payload");
    }
    return std::string("none");
  };
  CHECK(part_of(good) == "none");
  CHECK(part_of(good.substr(0, good.size() - 100)) == "payload");
  std::string magic = good;
  magic[0] = 'X';
  CHECK(part_of(magic) == "header");
  std::string version = good;
  version[4] = 9;
  CHECK(part_of(version) == "header");
  CHECK(part_of(good.substr(0, 6)) == "header");
  std::string flipped = good;
  flipped[flipped.size() / 2] ^= 0x40;
  CHECK(part_of(flipped) == "payload");
}

TEST_CASE("suite passes on a small configuration") {
  SuiteConfig cfg;
  cfg.sizes = {1, 2, 17, 300};
  cfg.datasets = 16;
  cfg.queries = 40;
  const auto rep = run_suite(cfg);
  CHECK(rep.cases.size() == 32);
  for (const auto& c : rep.cases) INFO(c.witness);
  CHECK(rep.ok());
  CHECK(rep.to_json().find("\"ok\": true") != std::string::npos);
}

TEST_CASE("planted bug is caught with a witness") {
  SuiteConfig cfg;
  cfg.sizes = {100};
  cfg.datasets = 2;
  cfg.queries = 50;
  cfg.audit_max_n = 0;
  cfg.tamper = [](std::vector<PointId>& ids) {
    if (!ids.empty()) ids.pop_back();
  };
  const auto rep = run_suite(cfg);
  CHECK_FALSE(rep.ok());
  bool witnessed = false;
  for (const auto& c : rep.cases) witnessed = witnessed || c.witness.find("seed=") != std::string::npos;
  CHECK(witnessed);
}

TEST_CASE("empty dataset list gives an empty passing report") {
  SuiteConfig cfg;
  cfg.datasets = 0;
  const auto rep = run_suite(cfg);
  CHECK(rep.cases.empty());
  CHECK(rep.ok());
}
