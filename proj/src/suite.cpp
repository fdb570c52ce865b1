#include "rrk/suite.hpp"

#include <chrono>
#include <json.hpp>
#include <sstream>

#include "rrk/oracle.hpp"

namespace rrk {

double visit_bound(std::size_t units, std::size_t k, std::size_t t0, std::size_t height, std::size_t rho, double c) {
  return static_cast<double>(units) +
         c * (static_cast<double>(k) / static_cast<double>(t0) + 1.0) * static_cast<double>(height * rho);
}

bool SuiteReport::ok() const {
  for (const auto& c : cases) {
    if (!c.ok()) return false;
  }
  return true;
}

std::string SuiteReport::to_json() const {
  nlohmann::json j;
  j["ok"] = ok();
  j["seconds"] = seconds;
  j["cases"] = nlohmann::json::array();
  for (const auto& c : cases) {
    j["cases"].push_back({{"kind", c.kind},
                          {"n", c.n},
                          {"seed", c.seed},
                          {"structure", to_string(c.structure)},
                          {"build_ms", c.build_ms},
                          {"queries", c.queries},
                          {"k_total", c.k_total},
                          {"nodes_visited", c.nodes_visited},
                          {"mismatches", c.mismatches},
                          {"emptiness_mismatches", c.emptiness_mismatches},
                          {"visit_violations", c.visit_violations},
                          {"worst_visit_ratio", c.worst_visit_ratio},
                          {"decode_hops_max", c.decode_hops_max},
                          {"hop_bound", c.hop_bound},
                          {"hop_violations", c.hop_violations},
                          {"audited", c.audited},
                          {"audit_ok", c.audit_ok},
                          {"design_bits_total", c.design_bits_total},
                          {"ok", c.ok()},
                          {"witness", c.witness}});
  }
  return j.dump(2);
}

namespace {

std::string describe(const RawQuery5& q) {
  std::ostringstream os;
  os << q.box.a << ' ' << q.box.b << ' ' << q.box.c << ' ' << q.wlo << ' ' << q.whi;
  return os.str();
}

template <typename Index>
void run_case(const Index& ix, const Dataset& ds, const std::vector<RawQuery5>& queries,
              const std::vector<std::vector<PointId>>& truth, const SuiteConfig& cfg, SuiteCase& c) {
  c.hop_bound = ix.hop_bound();
  c.design_bits_total = ix.space().design_bits_total();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const Query5 q = query_to_rank_space(queries[i], ds.dictionary);
    QueryStats st;
    auto got = ix.query(q, &st);
    if (cfg.tamper) cfg.tamper(got);
    ++c.queries;
    c.k_total += got.size();
    c.nodes_visited += st.nodes_visited;
    c.decode_hops_max = std::max(c.decode_hops_max, st.decode_hops_max);
    auto fail = [&](const std::string& what) {
      if (c.witness.empty()) {
        c.witness = what + " on query " + std::to_string(i) + " (" + describe(queries[i]) + "), dataset " + c.kind +
                    " n=" + std::to_string(c.n) + " seed=" + std::to_string(c.seed);
      }
    };
    if (got != truth[i]) {
      ++c.mismatches;
      fail("answer has " + std::to_string(got.size()) + " ids, oracle " + std::to_string(truth[i].size()));
    }
    if (ix.any(q) != !truth[i].empty()) {
      ++c.emptiness_mismatches;
      fail("emptiness verdict differs");
    }
    const double bound = visit_bound(st.canonical_units, truth[i].size(), ix.t0(), ix.height(), ix.rho(),
                                     cfg.visit_constant);
    c.worst_visit_ratio = std::max(c.worst_visit_ratio, st.nodes_visited / bound);
    if (st.nodes_visited > bound) {
      ++c.visit_violations;
      fail("expanded " + std::to_string(st.nodes_visited) + " nodes, bound " + std::to_string(bound));
    }
    if (st.decode_hops_max > c.hop_bound) {
      ++c.hop_violations;
      fail("decode took " + std::to_string(st.decode_hops_max) + " hops");
    }
  }
  if (cfg.audit_max_n && ds.size() <= cfg.audit_max_n) {
    c.audited = true;
    const auto rep = ix.audit();
    c.audit_ok = rep.ok();
    if (!c.audit_ok && c.witness.empty()) {
      c.witness = "audit failed: " + (rep.failures.empty() ? std::string("?") : rep.failures.front());
    }
  }
}

}  // namespace

SuiteReport run_suite(const SuiteConfig& cfg) {
  SuiteReport report;
  const auto start = std::chrono::steady_clock::now();
  if (cfg.kinds.empty() || cfg.sizes.empty()) return report;
  for (std::size_t i = 0; i < cfg.datasets; ++i) {
    const DatasetKind kind = cfg.kinds[i % cfg.kinds.size()];
    const std::size_t n = cfg.sizes[(i / cfg.kinds.size()) % cfg.sizes.size()];
    const std::uint64_t seed = cfg.seed + i;
    const Dataset ds = generate_dataset(kind, n, seed);
    const auto queries = random_queries(ds, cfg.queries, seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<std::vector<PointId>> truth;
    truth.reserve(queries.size());
    for (const auto& q : queries) truth.push_back(oracle_report(ds.raw, q));

    for (Structure s : cfg.structures) {
      SuiteCase c;
      c.kind = to_string(kind);
      c.n = n;
      c.seed = seed;
      c.structure = s;
      const auto t = std::chrono::steady_clock::now();
      if (s == Structure::kLinear) {
        const auto ix = LinearIndex::build(ds.points);
        c.build_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t).count();
        run_case(ix, ds, queries, truth, cfg, c);
      } else {
        const auto ix = FastIndex::build(ds.points);
        c.build_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t).count();
        run_case(ix, ds, queries, truth, cfg, c);
      }
      report.cases.push_back(std::move(c));
    }
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace rrk
