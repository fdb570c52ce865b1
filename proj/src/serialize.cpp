#include "rrk/serialize.hpp"

#include <zlib.h>

#include <array>
#include <cereal/archives/portable_binary.hpp>
#include <cereal/types/array.hpp>
#include <cereal/types/map.hpp>
#include <cereal/types/string.hpp>
#include <cereal/types/vector.hpp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

namespace rrk {

const char* to_string(Structure s) { return s == Structure::kLinear ? "linear" : "fast"; }

Structure structure_from_string(const std::string& name) {
  if (name == "linear") return Structure::kLinear;
  if (name == "fast") return Structure::kFast;
  throw std::invalid_argument("unknown structure '" + name + "' (expected linear or fast)");
}

namespace {

constexpr char kMagic[4] = {'R', 'R', 'K', '1'};
constexpr std::size_t kFixedHeader = 12;
constexpr std::size_t kEntrySize = 24;

struct Section {
  std::array<char, 4> tag;
  std::string payload;
};

std::uint32_t crc_of(const char* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data), chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const std::string& in, std::size_t at) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return static_cast<T>(v);
}

template <typename T>
std::string encode(const T& value) {
  std::ostringstream os(std::ios::binary);
  {
    cereal::PortableBinaryOutputArchive ar(os, cereal::PortableBinaryOutputArchive::Options::LittleEndian());
    ar(value);
  }
  return std::move(os).str();
}

template <typename T>
T decode(const std::string& bytes, const char* what) {
  std::istringstream is(bytes, std::ios::binary);
  T value;
  try {
    cereal::PortableBinaryInputArchive ar(is, cereal::PortableBinaryInputArchive::Options::LittleEndian());
    ar(value);
  } catch (const std::exception& e) {
    throw FormatError(FormatError::Part::kPayload, std::string("cannot decode ") + what + ": " + e.what());
  }
  return value;
}

void write_sections(std::ostream& out, Structure structure, const std::vector<Section>& sections) {
  std::string head(kMagic, 4);
  put_le<std::uint16_t>(head, kFormatVersion);
  put_le<std::uint8_t>(head, 1);
  put_le<std::uint8_t>(head, static_cast<std::uint8_t>(structure));
  put_le<std::uint32_t>(head, static_cast<std::uint32_t>(sections.size()));
  std::uint64_t offset = kFixedHeader + kEntrySize * sections.size() + 4;
  for (const auto& s : sections) {
    head.append(s.tag.data(), 4);
    put_le<std::uint64_t>(head, offset);
    put_le<std::uint64_t>(head, s.payload.size());
    put_le<std::uint32_t>(head, crc_of(s.payload.data(), s.payload.size()));
    offset += s.payload.size();
  }
  put_le<std::uint32_t>(head, crc_of(head.data(), head.size()));
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  for (const auto& s : sections) out.write(s.payload.data(), static_cast<std::streamsize>(s.payload.size()));
}

template <typename Index>
void write_any(std::ostream& out, Structure structure, const Index& ix, const RankDictionary* dict) {
  std::vector<Section> sections;
  sections.push_back({{'I', 'N', 'D', 'X'}, encode(ix)});
  if (dict) sections.push_back({{'D', 'I', 'C', 'T'}, encode(*dict)});
  write_sections(out, structure, sections);
}

}  // namespace

void write_index(std::ostream& out, const LinearIndex& ix, const RankDictionary* dict) {
  write_any(out, Structure::kLinear, ix, dict);
}

void write_index(std::ostream& out, const FastIndex& ix, const RankDictionary* dict) {
  write_any(out, Structure::kFast, ix, dict);
}

StoredIndex read_index(std::istream& in) {
  using Part = FormatError::Part;
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kFixedHeader) throw FormatError(Part::kHeader, "file too short");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError(Part::kHeader, "bad magic");
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != kFormatVersion) {
    throw FormatError(Part::kHeader, "unsupported version " + std::to_string(version));
  }
  if (get_le<std::uint8_t>(bytes, 6) != 1) throw FormatError(Part::kHeader, "not little-endian");
  const auto kind = get_le<std::uint8_t>(bytes, 7);
  if (kind != static_cast<std::uint8_t>(Structure::kLinear) && kind != static_cast<std::uint8_t>(Structure::kFast)) {
    throw FormatError(Part::kHeader, "unknown structure " + std::to_string(kind));
  }
  const auto count = get_le<std::uint32_t>(bytes, 8);
  if (count > 16) throw FormatError(Part::kHeader, "implausible section count " + std::to_string(count));
  const std::size_t table_end = kFixedHeader + kEntrySize * count;
  if (bytes.size() < table_end + 4) throw FormatError(Part::kHeader, "section table cut short");
  if (get_le<std::uint32_t>(bytes, table_end) != crc_of(bytes.data(), table_end)) {
    throw FormatError(Part::kHeader, "header checksum mismatch");
  }

  StoredIndex stored;
  stored.structure = static_cast<Structure>(kind);
  bool have_index = false;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t at = kFixedHeader + kEntrySize * i;
    const std::string tag = bytes.substr(at, 4);
    const auto offset = get_le<std::uint64_t>(bytes, at + 4);
    const auto size = get_le<std::uint64_t>(bytes, at + 12);
    const auto crc = get_le<std::uint32_t>(bytes, at + 20);
    if (offset > bytes.size() || size > bytes.size() - offset) {
      throw FormatError(Part::kPayload, "section " + tag + " extends past the end of the file (truncated?)");
    }
    if (crc_of(bytes.data() + offset, size) != crc) throw FormatError(Part::kPayload, "section " + tag + " checksum mismatch");
    const std::string payload = bytes.substr(offset, size);
    if (tag == "INDX") {
      if (stored.structure == Structure::kLinear) {
        stored.linear = decode<LinearIndex>(payload, "linear index");
      } else {
        stored.fast = decode<FastIndex>(payload, "fast index");
      }
      have_index = true;
    } else if (tag == "DICT") {
      stored.dictionary = decode<RankDictionary>(payload, "rank dictionary");
    }
  }
  if (!have_index) throw FormatError(Part::kHeader, "no INDX section");
  return stored;
}

void save_index(const std::string& path, const StoredIndex& stored) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const RankDictionary* dict = stored.dictionary ? &*stored.dictionary : nullptr;
  if (stored.linear) {
    write_index(out, *stored.linear, dict);
  } else {
    write_index(out, *stored.fast, dict);
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

StoredIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_index(in);
}

}  // namespace rrk
