#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rrk {

/// Per-query instrumentation. Counters are query-local; merge() sums them.
struct QueryStats {
  std::size_t canonical_units = 0;  // canonical nodes (linear) or child runs (fast)
  std::size_t nodes_visited = 0;    // canonical units plus nodes reached by recursion
  std::size_t cells_probed = 0;     // successful cell locations
  std::size_t small_dom_touched = 0;
  std::size_t points_decoded = 0;      // decodes of reported points
  std::size_t translate_decodes = 0;   // decodes spent mapping queries into cells
  std::size_t decode_hops_total = 0;
  std::size_t decode_hops_max = 0;
  std::size_t reported = 0;
  std::vector<std::size_t> hop_histogram;  // index = hops of one reported point

  void record_hops(std::size_t hops);
  void merge(const QueryStats& other);
};

/// Space in design bits (every field packed to its range) per component,
/// plus the bytes actually held in memory.
struct SpaceReport {
  std::map<std::string, std::uint64_t> design_bits;
  std::map<std::string, std::uint64_t> machine_bytes;

  void add_bits(const std::string& component, std::uint64_t bits) { design_bits[component] += bits; }
  void add_bytes(const std::string& component, std::uint64_t bytes) { machine_bytes[component] += bytes; }
  std::uint64_t design_bits_total() const;
  std::uint64_t machine_bytes_total() const;

  friend bool operator==(const SpaceReport&, const SpaceReport&) = default;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(design_bits, machine_bytes);
  }
};

/// Outcome of a structural audit over a built index.
struct AuditReport {
  struct Check {
    std::uint64_t total = 0;
    std::uint64_t passed = 0;
    bool ok() const { return total == passed; }
  };
  std::map<std::string, Check> checks;
  std::vector<std::string> failures;  // first few failures, human readable
  std::size_t decode_hops_max = 0;
  std::size_t decode_hop_bound = 0;

  void tally(const std::string& name, bool pass, const std::string& detail = {});
  bool ok() const;
};

/// Bits to store one value out of `values` distinct ones.
std::uint64_t bits_for(std::uint64_t values);
/// log2(n), but never below 1.
double log2_or_one(double n);

}  // namespace rrk
