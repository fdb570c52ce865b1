#pragma once

#include <cstdint>

#include "rrk/geom.hpp"

namespace rrk {

enum class CellKind : std::uint8_t {
  kC = 0,        // t0-cutting cell holding a small_dom structure
  kCPrime = 1,   // 4t0-cutting cell (linear index only)
  kD = 2,        // cell of a cutting built inside a C' cell
  kOverlay = 3,  // coarser cutting used for long decode jumps
  kOverlayD = 4  // cell of a cutting built inside an overlay cell
};

const char* to_string(CellKind kind);

/// A stored point named by the cell it sits in and its x-rank (0-based)
/// among that cell's members.
struct PointRef {
  std::uint32_t node = 0;
  CellKind kind = CellKind::kC;
  std::uint32_t cell = 0;  // global index among cells of that kind
  std::uint32_t rank = 0;

  friend bool operator==(const PointRef&, const PointRef&) = default;
};

/// A cell as stored by the indexes: its apex, owning tree node and the range
/// of its members in the per-member arrays of its kind.
struct CellRec {
  Point3 apex;
  std::uint32_t node = 0;
  std::uint32_t begin = 0;
  std::uint32_t size = 0;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(apex, node, begin, size);
  }
};

inline constexpr std::uint32_t kNoIndex = 0xffffffffu;

}  // namespace rrk
