#include "rrk/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace rrk {

void QueryStats::record_hops(std::size_t hops) {
  decode_hops_total += hops;
  decode_hops_max = std::max(decode_hops_max, hops);
  if (hop_histogram.size() <= hops) hop_histogram.resize(hops + 1, 0);
  ++hop_histogram[hops];
}

void QueryStats::merge(const QueryStats& o) {
  canonical_units += o.canonical_units;
  nodes_visited += o.nodes_visited;
  cells_probed += o.cells_probed;
  small_dom_touched += o.small_dom_touched;
  points_decoded += o.points_decoded;
  translate_decodes += o.translate_decodes;
  decode_hops_total += o.decode_hops_total;
  decode_hops_max = std::max(decode_hops_max, o.decode_hops_max);
  reported += o.reported;
  if (hop_histogram.size() < o.hop_histogram.size()) hop_histogram.resize(o.hop_histogram.size(), 0);
  for (std::size_t i = 0; i < o.hop_histogram.size(); ++i) hop_histogram[i] += o.hop_histogram[i];
}

std::uint64_t SpaceReport::design_bits_total() const {
  std::uint64_t s = 0;
  for (const auto& [k, v] : design_bits) s += v;
  return s;
}

std::uint64_t SpaceReport::machine_bytes_total() const {
  std::uint64_t s = 0;
  for (const auto& [k, v] : machine_bytes) s += v;
  return s;
}

void AuditReport::tally(const std::string& name, bool pass, const std::string& detail) {
  auto& c = checks[name];
  ++c.total;
  if (pass) {
    ++c.passed;
  } else if (failures.size() < 20) {
    failures.push_back(name + (detail.empty() ? "" : ": " + detail));
  }
}

bool AuditReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& kv) { return kv.second.ok(); });
}

std::uint64_t bits_for(std::uint64_t values) {
  return values <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(values - 1));
}

double log2_or_one(double n) { return n >= 2 ? std::log2(n) : 1.0; }

}  // namespace rrk
