// rrk: build, query, verify and measure 4D 5-sided range reporting indexes.
//
// Exit codes: 0 ok, 1 verification failure, 2 I/O error, 3 bad config.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>

#include "rrk/cutting.hpp"
#include "rrk/dataset.hpp"
#include "rrk/oracle.hpp"
#include "rrk/serialize.hpp"

using namespace rrk;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kIoError = 2, kBadConfig = 3 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
  } else {
    auto out = open_out(path);
    out << text << '\n';
  }
}

Dataset load_dataset(const std::string& path) {
  auto in = open_in(path);
  std::vector<RawPoint4> raw;
  try {
    raw = read_points(in);
  } catch (const std::runtime_error& e) {
    throw IoError(path + ": " + e.what());
  }
  if (raw.empty()) throw IoError(path + ": no points");
  return make_dataset(std::move(raw));
}

StoredIndex load(const std::string& path) {
  try {
    return load_index(path);
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
}

json space_json(const SpaceReport& s) {
  return {{"design_bits", s.design_bits},
          {"machine_bytes", s.machine_bytes},
          {"design_bits_total", s.design_bits_total()},
          {"machine_bytes_total", s.machine_bytes_total()}};
}

json stats_json(const QueryStats& st) {
  return {{"canonical_units", st.canonical_units},
          {"nodes_visited", st.nodes_visited},
          {"cells_probed", st.cells_probed},
          {"small_dom_touched", st.small_dom_touched},
          {"points_decoded", st.points_decoded},
          {"translate_decodes", st.translate_decodes},
          {"decode_hops_total", st.decode_hops_total},
          {"decode_hops_max", st.decode_hops_max},
          {"reported", st.reported},
          {"hop_histogram", st.hop_histogram}};
}

template <typename Config>
Config config_of(std::size_t rho, std::size_t t0) {
  Config c;
  c.rho = rho;
  c.t0 = t0;
  return c;
}

template <typename Fn>
auto with_index(const StoredIndex& s, Fn&& fn) {
  return s.linear ? fn(*s.linear) : fn(*s.fast);
}

// --- build -----------------------------------------------------------------

struct BuildArgs {
  std::string input, structure = "linear", out;
  std::size_t rho = 0, t0 = 0;
};

int cmd_build(const BuildArgs& a) {
  const Structure s = structure_from_string(a.structure);
  const Dataset ds = load_dataset(a.input);
  StoredIndex stored;
  stored.structure = s;
  stored.dictionary = ds.dictionary;
  const auto t = std::chrono::steady_clock::now();
  if (s == Structure::kLinear) {
    stored.linear = LinearIndex::build(ds.points, config_of<LinearConfig>(a.rho, a.t0));
  } else {
    stored.fast = FastIndex::build(ds.points, config_of<FastConfig>(a.rho, a.t0));
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t).count();
  try {
    save_index(a.out, stored);
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
  std::cerr << "built " << a.structure << " index on " << ds.size() << " points in " << ms << " ms -> " << a.out
            << '\n';
  return kOk;
}

// --- query -----------------------------------------------------------------

struct QueryArgs {
  std::string index, queries, out, stats;
};

int cmd_query(const QueryArgs& a) {
  const StoredIndex stored = load(a.index);
  if (!stored.dictionary) throw IoError(a.index + ": index has no rank dictionary, cannot map query values");
  auto in = open_in(a.queries);
  std::vector<RawQuery5> queries;
  try {
    queries = read_queries(in);
  } catch (const std::runtime_error& e) {
    throw IoError(a.queries + ": " + e.what());
  }
  QueryStats total;
  std::vector<std::vector<PointId>> results;
  results.reserve(queries.size());
  for (const auto& rq : queries) {
    const Query5 q = query_to_rank_space(rq, *stored.dictionary);
    results.push_back(with_index(stored, [&](const auto& ix) { return ix.query(q, &total); }));
  }
  if (a.out.empty() || a.out == "-") {
    write_results(std::cout, results);
  } else {
    auto out = open_out(a.out);
    write_results(out, results);
  }
  if (!a.stats.empty()) {
    json j = stats_json(total);
    j["queries"] = queries.size();
    emit(a.stats, j.dump(2));
  }
  return kOk;
}

// --- verify ----------------------------------------------------------------

struct VerifyArgs {
  std::string index, input;
  std::size_t queries = 200;
  std::uint64_t seed = 1;
  std::vector<std::size_t> ts = {1, 4, 16, 64};
};

int verify_index(const VerifyArgs& a) {
  const StoredIndex stored = load(a.index);
  return with_index(stored, [&](const auto& ix) {
    const auto rep = ix.audit();
    json j;
    j["structure"] = to_string(stored.structure);
    j["n"] = ix.size();
    j["audit_ok"] = rep.ok();
    j["decode_hops_max"] = rep.decode_hops_max;
    j["decode_hop_bound"] = rep.decode_hop_bound;
    for (const auto& [name, c] : rep.checks) j["checks"][name] = {{"total", c.total}, {"passed", c.passed}};
    j["failures"] = rep.failures;

    // random rank-space queries against a scan of the stored points
    std::mt19937_64 rng(a.seed);
    const auto n = static_cast<Coord>(ix.size());
    std::uniform_int_distribution<Coord> d(0, n + 1);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < a.queries; ++i) {
      Coord lo = d(rng), hi = d(rng);
      if (lo > hi) std::swap(lo, hi);
      const Query5 q{{d(rng), d(rng), d(rng)}, lo, hi};
      if (ix.query(q) != oracle_report(ix.leaves(), q)) ++mismatches;
    }
    j["queries"] = a.queries;
    j["mismatches"] = mismatches;
    const bool ok = rep.ok() && mismatches == 0;
    j["ok"] = ok;
    std::cout << j.dump(2) << '\n';
    return ok ? kOk : kVerifyFailed;
  });
}

int verify_cuttings(const VerifyArgs& a) {
  const Dataset ds = load_dataset(a.input);
  std::vector<Point3> set;
  for (const auto& p : ds.points) set.push_back(p.xyz());
  if (set.size() > 1024) throw std::invalid_argument("exhaustive cutting checks need n <= 1024");
  json j;
  j["n"] = set.size();
  bool ok = true;
  for (std::size_t t : a.ts) {
    if (t == 0) throw std::invalid_argument("t must be >= 1");
    const auto cut = build_cutting(set, t);
    const auto rep = verify_cutting(set, t, cut);
    ok = ok && rep.ok;
    j["cuttings"].push_back({{"t", t},
                             {"cells", cut.size()},
                             {"size_ratio", cut.size_ratio()},
                             {"ok", rep.ok},
                             {"violations", rep.violations}});
  }
  j["ok"] = ok;
  std::cout << j.dump(2) << '\n';
  return ok ? kOk : kVerifyFailed;
}

// --- bench -----------------------------------------------------------------

struct BenchArgs {
  std::vector<std::size_t> sizes = {1000, 4000};
  std::vector<std::string> kinds = {"uniform"};
  std::vector<std::string> structures = {"linear", "fast"};
  std::size_t queries = 200;
  std::uint64_t seed = 1;
  std::size_t rho = 0, t0 = 0;
  std::string report;
};

int cmd_bench(const BenchArgs& a) {
  std::vector<DatasetKind> kinds;
  for (const auto& k : a.kinds) kinds.push_back(dataset_kind_from_string(k));
  std::vector<Structure> structures;
  for (const auto& s : a.structures) structures.push_back(structure_from_string(s));
  json rows = json::array();
  bool ok = true;
  for (std::size_t n : a.sizes) {
    if (n == 0) throw std::invalid_argument("sizes must be >= 1");
    for (DatasetKind kind : kinds) {
      const Dataset ds = generate_dataset(kind, n, a.seed);
      const auto queries = random_queries(ds, a.queries, a.seed + 1);
      for (Structure s : structures) {
        auto measure = [&](const auto& ix, double build_ms) {
          QueryStats total;
          std::size_t mismatches = 0;
          const auto t = std::chrono::steady_clock::now();
          for (const auto& rq : queries) {
            const auto got = ix.query(query_to_rank_space(rq, ds.dictionary), &total);
            if (got.size() != oracle_report(ds.raw, rq).size()) ++mismatches;
          }
          const double query_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t).count();
          ok = ok && mismatches == 0;
          rows.push_back({{"n", n},
                          {"kind", to_string(kind)},
                          {"structure", to_string(s)},
                          {"rho", ix.rho()},
                          {"t0", ix.t0()},
                          {"build_ms", build_ms},
                          {"query_ms", query_ms},
                          {"queries", queries.size()},
                          {"k_total", total.reported},
                          {"nodes_visited", total.nodes_visited},
                          {"decode_hops_max", total.decode_hops_max},
                          {"design_bits_total", ix.space().design_bits_total()},
                          {"machine_bytes_total", ix.space().machine_bytes_total()},
                          {"mismatches", mismatches}});
        };
        const auto t = std::chrono::steady_clock::now();
        if (s == Structure::kLinear) {
          const auto ix = LinearIndex::build(ds.points, config_of<LinearConfig>(a.rho, a.t0));
          measure(ix, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t).count());
        } else {
          const auto ix = FastIndex::build(ds.points, config_of<FastConfig>(a.rho, a.t0));
          measure(ix, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t).count());
        }
        std::cerr << "bench " << to_string(s) << " " << to_string(kind) << " n=" << n << " done\n";
      }
    }
  }
  emit(a.report, rows.dump(2));
  return ok ? kOk : kVerifyFailed;
}

// --- stats -----------------------------------------------------------------

int cmd_stats(const std::string& path) {
  const StoredIndex stored = load(path);
  const json j = with_index(stored, [&](const auto& ix) {
    json r = {{"structure", to_string(stored.structure)},
              {"n", ix.size()},
              {"rho", ix.rho()},
              {"t0", ix.t0()},
              {"height", ix.height()},
              {"hop_bound", ix.hop_bound()},
              {"space", space_json(ix.space())}};
    return r;
  });
  std::cout << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"4D 5-sided orthogonal range reporting with range trees over shallow cuttings"};
  app.require_subcommand(1);

  BuildArgs ba;
  auto* build = app.add_subcommand("build", "build an index from a points file");
  build->add_option("--input", ba.input, "points file (x y z w per line)")->required();
  build->add_option("--structure", ba.structure, "linear or fast")->check(CLI::IsMember({"linear", "fast"}));
  build->add_option("--rho", ba.rho, "tree fan-out (0 = default)");
  build->add_option("--t0", ba.t0, "cutting parameter t0 (0 = default)");
  build->add_option("--out", ba.out, "index file")->required();

  QueryArgs qa;
  auto* query = app.add_subcommand("query", "answer a file of queries");
  query->add_option("--index", qa.index, "index file")->required();
  query->add_option("--queries", qa.queries, "queries file (a b c wlo whi per line)")->required();
  query->add_option("--out", qa.out, "results file (default stdout)");
  query->add_option("--stats", qa.stats, "write aggregated query statistics as JSON ('-' for stdout)");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "audit an index, or check shallow cuttings of a point set");
  auto* vi = verify->add_option("--index", va.index, "index file to audit");
  auto* vin = verify->add_option("--input", va.input, "points file for cutting-only checks");
  vi->excludes(vin);
  verify->add_option("--queries", va.queries, "random oracle queries for --index");
  verify->add_option("--seed", va.seed, "seed for the random queries");
  verify->add_option("--t", va.ts, "cutting parameters for --input")->delimiter(',');

  BenchArgs bea;
  auto* bench = app.add_subcommand("bench", "generate datasets, build, query and report costs");
  bench->add_option("--sizes", bea.sizes, "comma separated n values")->delimiter(',');
  bench->add_option("--kinds", bea.kinds, "dataset kinds")->delimiter(',');
  bench->add_option("--structures", bea.structures, "linear,fast")->delimiter(',');
  bench->add_option("--queries", bea.queries, "queries per dataset");
  bench->add_option("--seed", bea.seed, "generator seed");
  bench->add_option("--rho", bea.rho, "tree fan-out (0 = default)");
  bench->add_option("--t0", bea.t0, "cutting parameter t0 (0 = default)");
  bench->add_option("--report", bea.report, "JSON report path (default stdout)");

  std::string stats_path;
  auto* stats = app.add_subcommand("stats", "print the space report of an index");
  stats->add_option("--index", stats_path, "index file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadConfig;
  }

  try {
    if (*build) return cmd_build(ba);
    if (*query) return cmd_query(qa);
    if (*verify) {
      if (!va.index.empty()) return verify_index(va);
      if (!va.input.empty()) return verify_cuttings(va);
      std::cerr << "verify: need --index or --input\n";
      return kBadConfig;
    }
    if (*bench) return cmd_bench(bea);
    if (*stats) return cmd_stats(stats_path);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVerifyFailed;
  }
  return kBadConfig;
}
