#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rrk/dataset.hpp"
#include "rrk/fast_index.hpp"
#include "rrk/linear_index.hpp"
#include "rrk/serialize.hpp"

namespace rrk {

struct SuiteConfig {
  std::vector<DatasetKind> kinds = all_dataset_kinds();
  std::vector<std::size_t> sizes = {1, 2, 17, 256, 1000, 5000};
  /// Dataset i uses kinds[i % kinds], sizes[(i / kinds) % sizes] and seed + i.
  std::size_t datasets = 200;
  std::size_t queries = 100;
  std::uint64_t seed = 1;
  std::vector<Structure> structures = {Structure::kLinear, Structure::kFast};
  /// Indexes with at most this many points are audited; 0 disables audits.
  std::size_t audit_max_n = 4096;
  /// Constant of the expanded-node bound units + c * (k/t0 + 1) * height * rho.
  double visit_constant = 4.0;
  /// Test hook: applied to every answer before it is compared.
  std::function<void(std::vector<PointId>&)> tamper;
};

/// Outcome for one (dataset, structure) pair.
struct SuiteCase {
  std::string kind;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  Structure structure = Structure::kLinear;
  double build_ms = 0;
  std::size_t queries = 0;
  std::size_t mismatches = 0;
  std::size_t emptiness_mismatches = 0;
  std::size_t visit_violations = 0;
  std::size_t hop_violations = 0;
  std::size_t k_total = 0;
  std::size_t nodes_visited = 0;
  double worst_visit_ratio = 0;  // visited / bound over the queries
  std::size_t decode_hops_max = 0;
  std::size_t hop_bound = 0;
  bool audited = false;
  bool audit_ok = true;
  std::uint64_t design_bits_total = 0;
  /// First failure, with enough to reproduce it.
  std::string witness;

  bool ok() const {
    return mismatches == 0 && emptiness_mismatches == 0 && visit_violations == 0 && hop_violations == 0 && audit_ok;
  }
};

struct SuiteReport {
  std::vector<SuiteCase> cases;
  double seconds = 0;
  bool ok() const;
  std::string to_json() const;
};

/// Builds every configured structure on every dataset and compares query
/// and emptiness answers with the brute-force oracle on random queries in
/// original values.
SuiteReport run_suite(const SuiteConfig& config);

/// Bound on expanded nodes for one query.
double visit_bound(std::size_t units, std::size_t k, std::size_t t0, std::size_t height, std::size_t rho, double c);

}  // namespace rrk
