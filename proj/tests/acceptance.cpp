// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed
// below. An optional argument names a JSON file for the detailed numbers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "rrk/cutting.hpp"
#include "rrk/dataset.hpp"
#include "rrk/oracle.hpp"
#include "rrk/serialize.hpp"
#include "rrk/small_dom.hpp"
#include "rrk/suite.hpp"

using namespace rrk;
using nlohmann::json;

namespace {

constexpr double kSuiteSeconds = 300.0;
constexpr double kCuttingRatio = 8.0;
constexpr double kLinearGrowth = 2.35;
constexpr double kFastWordsConstant = 64.0;  // c_f
constexpr double kVisitConstant = 4.0;
constexpr std::size_t kTouchedFactor = 64;

json details;
int failures = 0;

void verdict(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  details["criteria"].push_back({{"id", id}, {"name", name}, {"ok", ok}, {"detail", detail}});
  failures += !ok;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// --- 1, 3, 5: the oracle suite -----------------------------------------------

SuiteReport suite;

void oracle_suite() {
  SuiteConfig cfg;
  cfg.visit_constant = kVisitConstant;
  suite = run_suite(cfg);

  std::size_t queries = 0, mismatches = 0;
  std::string witness;
  for (const auto& c : suite.cases) {
    queries += c.queries;
    mismatches += c.mismatches;
    if (c.mismatches && witness.empty()) witness = " first: " + c.witness;
  }
  const std::size_t datasets = suite.cases.size() / 2;
  verdict(1, "oracle equivalence", mismatches == 0 && datasets == 200 && suite.seconds < kSuiteSeconds,
          fmt("%zu datasets, %zu structure queries, %zu mismatches, %.1f s (limit %.0f s)", datasets, queries,
              mismatches, suite.seconds, kSuiteSeconds) +
              witness);
}

// --- 2: cutting validity -------------------------------------------------------

void cutting_validity() {
  const auto kinds = all_dataset_kinds();
  const std::size_t ts[] = {1, 4, 16, 64};
  std::mt19937_64 rng(2024);
  std::size_t checked = 0, invalid = 0, over = 0;
  double worst_ratio = 0;
  std::string witness;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < 50; ++i) {
    // a few tiny sets, the rest spread up to 512
    const std::size_t n = i < 5 ? i + 1 : std::uniform_int_distribution<std::size_t>(6, 512)(rng);
    const Dataset ds = generate_dataset(kinds[i % kinds.size()], n, 500 + i);
    std::vector<Point3> set;
    for (const auto& p : ds.points) set.push_back(p.xyz());
    for (std::size_t t : ts) {
      const Cutting cut = build_cutting(set, t);
      const auto rep = verify_cutting(set, t, cut, kCuttingRatio);
      ++checked;
      const double ratio = cut.size_ratio();
      // one cell is unavoidable, so for t > 8n only the +1 form can hold
      const bool size_ok = t * 1.0 <= kCuttingRatio * n ? ratio <= kCuttingRatio
                                                         : cut.size() <= kCuttingRatio * n / t + 1;
      if (t <= kCuttingRatio * n) worst_ratio = std::max(worst_ratio, ratio);
      invalid += !rep.ok;
      over += !size_ok;
      if ((!rep.ok || !size_ok) && witness.empty()) {
        witness = fmt(" first: %s n=%zu t=%zu cells=%zu", to_string(kinds[i % kinds.size()]), n, t, cut.size());
        if (!rep.violations.empty()) witness += " " + rep.violations.front();
      }
    }
  }
  verdict(2, "shallow cutting validity", invalid == 0 && over == 0,
          fmt("%zu cuttings, %zu invalid, %zu over size, worst cells*t/n %.3f (limit %.0f), %.1f s", checked,
              invalid, over, worst_ratio, kCuttingRatio, seconds_since(start)) +
              witness);
}

// --- 3: audits -----------------------------------------------------------------

void audits() {
  std::size_t audited = 0, failed = 0;
  std::string witness;
  for (const auto& c : suite.cases) {
    if (!c.audited) continue;
    ++audited;
    if (!c.audit_ok) {
      ++failed;
      if (witness.empty()) witness = " first: " + c.witness;
    }
  }
  // the suite sizes stop at 1000 below the audit limit, so add n = 4096
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t decodes = 0;
  for (DatasetKind kind : all_dataset_kinds()) {
    const Dataset ds = generate_dataset(kind, 4096, 4096);
    auto check = [&](const auto& ix, const char* name) {
      const auto rep = ix.audit();
      ++audited;
      decodes += rep.checks.at("decode round trip").total;
      if (!rep.ok()) {
        ++failed;
        if (witness.empty()) {
          witness = fmt(" first: %s %s n=4096 ", name, to_string(kind)) +
                    (rep.failures.empty() ? std::string("?") : rep.failures.front());
        }
      }
    };
    check(LinearIndex::build(ds.points), "linear");
    check(FastIndex::build(ds.points), "fast");
  }
  verdict(3, "containment maps and decode round trips", failed == 0 && audited > 0,
          fmt("%zu indexes audited (n <= 4096), %zu failed, %llu decodes at n=4096 (%.1f s)", audited, failed,
              static_cast<unsigned long long>(decodes), seconds_since(start)) +
              witness);
}

// --- 4: space scaling ------------------------------------------------------------

void space_scaling() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> totals;
  std::string ratios;
  bool linear_ok = true;
  for (std::size_t n = 1u << 13; n <= 1u << 16; n *= 2) {
    const Dataset ds = generate_dataset(DatasetKind::kUniform, n, n);
    totals.push_back(static_cast<double>(LinearIndex::build(ds.points).space().design_bits_total()));
    details["space"]["linear"].push_back({{"n", n}, {"design_bits_total", totals.back()}});
    if (totals.size() > 1) {
      const double r = totals.back() / totals[totals.size() - 2];
      linear_ok = linear_ok && r <= kLinearGrowth;
      ratios += fmt("%s%.3f", ratios.empty() ? "" : ", ", r);
    }
  }

  bool fast_ok = true;
  double worst = 0, bound = 0;
  for (std::size_t n = 1u << 10; n <= 1u << 14; n *= 2) {
    const Dataset ds = generate_dataset(DatasetKind::kUniform, n, n + 1);
    const auto ix = FastIndex::build(ds.points);
    const double word_bits = std::ceil(std::log2(static_cast<double>(n)));
    const double words = static_cast<double>(ix.space().design_bits_total()) / word_bits / static_cast<double>(n);
    const double b = kFastWordsConstant * std::pow(std::log2(static_cast<double>(n)), 3 * ix.epsilon());
    fast_ok = fast_ok && words <= b;
    if (bound == 0 || words / b > worst / bound) {
      worst = words;
      bound = b;
    }
    details["space"]["fast"].push_back({{"n", n}, {"words_per_point", words}, {"bound", b}, {"epsilon", ix.epsilon()}});
  }
  verdict(4, "space scaling", linear_ok && fast_ok,
          fmt("linear total(2n)/total(n) = %s for n = 2^13..2^16 (limit %.2f); fast words/n worst %.0f vs %.0f "
              "(c_f = %.0f) for n = 2^10..2^14 (%.1f s)",
              ratios.c_str(), kLinearGrowth, worst, bound, kFastWordsConstant, seconds_since(start)));
}

// --- 5: query cost ---------------------------------------------------------------

void query_cost() {
  std::size_t queries = 0, visit_violations = 0, hop_violations = 0, fast_hops = 0;
  double worst = 0;
  std::string witness;
  for (const auto& c : suite.cases) {
    queries += c.queries;
    visit_violations += c.visit_violations;
    worst = std::max(worst, c.worst_visit_ratio);
    if (c.structure == Structure::kFast) {
      hop_violations += c.hop_violations;
      fast_hops = std::max(fast_hops, c.decode_hops_max);
    }
    if ((c.visit_violations || (c.structure == Structure::kFast && c.hop_violations)) && witness.empty()) {
      witness = " first: " + c.witness;
    }
  }
  verdict(5, "query cost", visit_violations == 0 && hop_violations == 0,
          fmt("%zu queries, expanded-node violations %zu (worst visited/bound %.3f, c = %.0f), fast decode hops max "
              "%zu, hop violations %zu",
              queries, visit_violations, worst, kVisitConstant, fast_hops, hop_violations) +
              witness);
}

// --- 6: emptiness ------------------------------------------------------------------

void emptiness() {
  const auto kinds = all_dataset_kinds();
  const std::size_t sizes[] = {1, 17, 256, 1000, 5000};
  std::size_t total = 0, empty = 0, wrong = 0;
  std::string witness;
  for (std::size_t i = 0; i < 10; ++i) {
    const std::size_t n = sizes[i % 5];
    const DatasetKind kind = kinds[i % kinds.size()];
    const Dataset ds = generate_dataset(kind, n, 6000 + i);
    const auto lin = LinearIndex::build(ds.points);
    const auto fast = FastIndex::build(ds.points);
    for (const auto& rq : random_queries(ds, 1000, 7000 + i)) {
      const bool truth = !oracle_report(ds.raw, rq).empty();
      const Query5 q = query_to_rank_space(rq, ds.dictionary);
      ++total;
      empty += !truth;
      const bool bad = lin.any(q) != truth || fast.any(q) != truth;
      wrong += bad;
      if (bad && witness.empty()) witness = fmt(" first: %s n=%zu seed=%zu", to_string(kind), n, 6000 + i);
    }
  }
  verdict(6, "emptiness agreement", wrong == 0 && total == 10000,
          fmt("%zu queries (%zu empty), %zu disagreements", total, empty, wrong) + witness);
}

// --- 7: small sets -------------------------------------------------------------------

void small_sets() {
  const std::size_t t0 = FastConfig::default_t0(4096);
  std::mt19937_64 rng(77);
  std::size_t queries = 0, wrong = 0, over = 0, audit_failed = 0, max_size = 0;
  double worst = 0;
  std::string witness;
  for (std::size_t s = 0; s < 500; ++s) {
    const std::size_t m = s < 100 ? std::uniform_int_distribution<std::size_t>(0, 30)(rng)
                                  : std::uniform_int_distribution<std::size_t>(31, 4 * t0)(rng);
    max_size = std::max(max_size, m);
    // half rank permutations, half small value ranges with ties
    const bool ties = s % 2;
    std::vector<Point3> pts(m);
    if (ties) {
      std::uniform_int_distribution<Coord> d(1, static_cast<Coord>(m / 3 + 1));
      for (auto& p : pts) p = {d(rng), d(rng), d(rng)};
    } else {
      std::vector<Coord> x(m), y(m), z(m);
      for (std::size_t i = 0; i < m; ++i) x[i] = y[i] = z[i] = static_cast<Coord>(i + 1);
      std::shuffle(x.begin(), x.end(), rng);
      std::shuffle(y.begin(), y.end(), rng);
      std::shuffle(z.begin(), z.end(), rng);
      for (std::size_t i = 0; i < m; ++i) pts[i] = {x[i], y[i], z[i]};
    }
    const SmallDom sd(pts);
    if (!sd.audit()) ++audit_failed;

    auto probe = [&](const DominanceBox3& q) {
      std::vector<std::uint32_t> want;
      for (std::uint32_t i = 0; i < m; ++i) {
        if (in_box(q, pts[i])) want.push_back(i);
      }
      std::vector<std::uint32_t> got;
      SmallDomCounters cnt;
      sd.query(q, got, &cnt);
      std::sort(got.begin(), got.end());
      ++queries;
      const std::size_t limit = kTouchedFactor * (want.size() + 1);
      worst = std::max(worst, static_cast<double>(cnt.touched) / static_cast<double>(limit));
      const bool bad = got != want || sd.any(q) != !want.empty();
      wrong += bad;
      over += cnt.touched > limit;
      if ((bad || cnt.touched > limit) && witness.empty()) {
        witness = fmt(" first: set %zu size %zu query (%lld,%lld,%lld) touched %zu k %zu", s, m,
                      static_cast<long long>(q.a), static_cast<long long>(q.b), static_cast<long long>(q.c),
                      cnt.touched, want.size());
      }
    };
    const auto top = static_cast<Coord>(m + 1);
    if (m <= 30) {
      for (Coord a = 0; a <= top; ++a)
        for (Coord b = 0; b <= top; ++b)
          for (Coord c = 0; c <= top; ++c) probe({a, b, c});
    } else {
      std::uniform_int_distribution<Coord> d(0, top);
      for (int i = 0; i < 300; ++i) probe({d(rng), d(rng), d(rng)});
    }
  }
  verdict(7, "small-set dominance", wrong == 0 && over == 0 && audit_failed == 0,
          fmt("500 sets (size <= %zu = 4*t0, largest %zu), %zu queries, %zu wrong, %zu over 64(k+1) touched "
              "(worst touched/limit %.3f), %zu audit failures",
              4 * t0, max_size, queries, wrong, over, worst, audit_failed) +
              witness);
}

// --- 8: serialization ---------------------------------------------------------------

void serialization() {
  const auto kinds = all_dataset_kinds();
  const std::size_t sizes[] = {1, 2, 17, 256, 1000, 5000};
  std::size_t checked = 0, bad = 0;
  std::string witness;
  for (std::size_t i = 0; i < 10; ++i) {
    const DatasetKind kind = kinds[i % kinds.size()];
    const std::size_t n = sizes[i % 6];
    const Dataset ds = generate_dataset(kind, n, 8000 + i);
    const auto queries = random_queries(ds, 100, 9000 + i);
    auto round_trip = [&](const auto& ix, auto member, const char* name) {
      std::stringstream first;
      write_index(first, ix, &ds.dictionary);
      const std::string bytes = first.str();
      std::stringstream in(bytes);
      const StoredIndex back = read_index(in);
      const auto& ix2 = *(back.*member);
      bool same = ix2.space() == ix.space() && back.dictionary.has_value();
      for (const auto& rq : queries) {
        const Query5 q = query_to_rank_space(rq, ds.dictionary);
        same = same && ix2.query(q) == ix.query(q) && query_to_rank_space(rq, *back.dictionary) == q;
      }
      std::stringstream again;
      write_index(again, ix2, &*back.dictionary);
      same = same && again.str() == bytes;
      ++checked;
      if (!same) {
        ++bad;
        if (witness.empty()) witness = fmt(" first: %s %s n=%zu", name, to_string(kind), n);
      }
    };
    round_trip(LinearIndex::build(ds.points), &StoredIndex::linear, "linear");
    round_trip(FastIndex::build(ds.points), &StoredIndex::fast, "fast");
  }
  verdict(8, "serialization round trip", bad == 0,
          fmt("10 datasets, %zu indexes, %zu changed answers, space report or bytes", checked, bad) + witness);
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = std::chrono::steady_clock::now();
  oracle_suite();
  cutting_validity();
  audits();
  space_scaling();
  query_cost();
  emptiness();
  small_sets();
  serialization();
  const double total = seconds_since(start);
  std::printf("%s: %d of 8 criteria failed (%.1f s)\n", failures ? "FAIL" : "PASS", failures, total);
  if (argc > 1) {
    details["seconds"] = total;
    details["suite"] = json::parse(suite.to_json());
    std::ofstream(argv[1]) << details.dump(2) << '\n';
  }
  return failures ? 1 : 0;
}
