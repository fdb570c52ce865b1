#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "rrk/geom.hpp"
#include "rrk/rank_space.hpp"

namespace rrk {

/// A point set in original values together with its rank-space image.
/// Ids are dense, 1..n.
struct Dataset {
  std::vector<RawPoint4> raw;
  std::vector<Point4> points;  // rank space, same order as raw
  RankDictionary dictionary;
  std::string generator;       // "file" for loaded data
  std::uint64_t seed = 0;

  std::size_t size() const { return raw.size(); }
};

enum class DatasetKind { kUniform, kClustered, kDiagonal, kAdversarialDuplicates };

const char* to_string(DatasetKind kind);
/// Throws std::invalid_argument on an unknown name.
DatasetKind dataset_kind_from_string(const std::string& name);
std::vector<DatasetKind> all_dataset_kinds();

/// Builds the rank-space image of `raw`; ids are reassigned to 1..n in
/// input order.
Dataset make_dataset(std::vector<RawPoint4> raw, std::string generator = "file", std::uint64_t seed = 0);

/// n >= 1; identical (kind, n, seed) give identical datasets.
///   uniform     each coordinate uniform in [0, 1)
///   clustered   points around 8 random centres, offsets up to 0.03
///   diagonal    (i, i, i, i) for i = 1..n
///   adversarial-duplicates  coordinates from max(1, n/8) integer values
Dataset generate_dataset(DatasetKind kind, std::size_t n, std::uint64_t seed);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Random queries in original values. Bounds are taken from existing
/// coordinates (so ties are exercised), with occasional open or empty
/// sides.
std::vector<RawQuery5> random_queries(const Dataset& ds, std::size_t count, std::uint64_t seed);

/// Text formats. Points: "x y z w" per line; queries: "a b c wlo whi";
/// results: the sorted ids of one query per line. Blank lines and lines
/// starting with '#' are skipped when reading. Readers throw
/// std::runtime_error naming the line on malformed input.
std::vector<RawPoint4> read_points(std::istream& in);
void write_points(std::ostream& out, const std::vector<RawPoint4>& points);
std::vector<RawQuery5> read_queries(std::istream& in);
void write_queries(std::ostream& out, const std::vector<RawQuery5>& queries);
void write_results(std::ostream& out, const std::vector<std::vector<PointId>>& results);
std::vector<std::vector<PointId>> read_results(std::istream& in);

}  // namespace rrk
