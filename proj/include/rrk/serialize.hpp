#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "rrk/fast_index.hpp"
#include "rrk/linear_index.hpp"
#include "rrk/rank_space.hpp"

namespace rrk {

/// Index file layout, all integers little-endian:
///
///   "RRK1" | u16 version | u8 endianness (1 = little) | u8 structure |
///   u32 section count | sections * (tag[4], u64 offset, u64 size, u32 crc32) |
///   u32 crc32 of everything before it | section payloads
///
/// Sections: "INDX" (the index, cereal portable binary) and optionally
/// "DICT" (the rank dictionary, needed to answer queries in original values).
inline constexpr std::uint16_t kFormatVersion = 1;

class FormatError : public std::runtime_error {
 public:
  enum class Part { kHeader, kPayload };
  FormatError(Part part, const std::string& what)
      : std::runtime_error((part == Part::kHeader ? "index header: " : "index payload: ") + what), part_(part) {}
  Part part() const { return part_; }

 private:
  Part part_;
};

enum class Structure : std::uint8_t { kLinear = 1, kFast = 2 };
const char* to_string(Structure s);
/// Throws std::invalid_argument on anything but "linear" or "fast".
Structure structure_from_string(const std::string& name);

struct StoredIndex {
  Structure structure = Structure::kLinear;
  std::optional<LinearIndex> linear;
  std::optional<FastIndex> fast;
  std::optional<RankDictionary> dictionary;

  const SpaceReport& space() const { return linear ? linear->space() : fast->space(); }
  std::size_t size() const { return linear ? linear->size() : fast->size(); }
};

void write_index(std::ostream& out, const LinearIndex& ix, const RankDictionary* dict = nullptr);
void write_index(std::ostream& out, const FastIndex& ix, const RankDictionary* dict = nullptr);
/// Throws FormatError.
StoredIndex read_index(std::istream& in);

/// File wrappers; I/O failures throw std::runtime_error.
void save_index(const std::string& path, const StoredIndex& stored);
StoredIndex load_index(const std::string& path);

}  // namespace rrk
