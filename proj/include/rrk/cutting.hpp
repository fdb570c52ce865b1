#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rrk/geom.hpp"

namespace rrk {

/// A cell of a shallow cutting: every point dominated by `apex`.
///
/// Members are kept in x order, so a member's slot (0-based) is its x-rank
/// within the cell minus one. `local` holds each member's (x, y, z) ranks in
/// the cell's own rank space (1-based); `y_order`/`z_order` list slots by
/// increasing y and z.
struct Cell {
  Point3 apex;
  std::vector<std::uint32_t> members;  // indices into the input set, x order
  std::vector<Point3> local;
  std::vector<std::uint32_t> y_order;
  std::vector<std::uint32_t> z_order;

  std::size_t size() const { return members.size(); }
};

/// Answers "which cell's apex dominates q?" over a fixed set of apexes.
///
/// Apexes are sorted by x; a merge-sort tree over that order keeps, per node,
/// the apexes sorted by decreasing y together with a running max of z. Below
/// `kScanThreshold` cells a linear scan is used instead.
class ApexLocator {
 public:
  static constexpr std::size_t kScanThreshold = 64;

  ApexLocator() = default;
  explicit ApexLocator(std::span<const Point3> apexes);

  /// Index of some apex dominating q, if any.
  std::optional<std::uint32_t> locate(const Point3& q) const;

  std::size_t size() const { return apexes_.size(); }
  /// Stored words, for space accounting.
  std::size_t entries() const { return apexes_.size() + entries_.size(); }
  std::uint64_t physical_bytes() const;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(apexes_, by_x_, xs_, leaves_, node_begin_, entries_);
  }

 private:
  struct Entry {
    Coord y;
    Coord zmax;  // max z over this entry and all earlier entries of the node
    std::uint32_t argmax;

    template <class Archive>
    void serialize(Archive& ar) {
      ar(y, zmax, argmax);
    }
  };

  std::vector<Point3> apexes_;
  std::vector<std::uint32_t> by_x_;  // apex indices sorted by x
  std::vector<Coord> xs_;            // x of by_x_
  std::size_t leaves_ = 0;
  std::vector<std::uint32_t> node_begin_;
  std::vector<Entry> entries_;
};

struct CuttingOptions {
  /// Upper corner of the domain; apex coordinates never exceed it. Defaults
  /// to the componentwise max of the input.
  std::optional<Point3> bound;
};

/// A t-shallow cutting of a 3D point set.
struct Cutting {
  std::size_t t = 0;
  Point3 bound{};
  std::size_t set_size = 0;
  std::vector<Cell> cells;
  ApexLocator locator;

  std::size_t size() const { return cells.size(); }
  /// cells * t / n, the measured size constant.
  double size_ratio() const;
};

/// Builds a t-shallow cutting of `set` (t >= 1). Every point of the domain
/// [0, bound]^3 with level <= t lies in some cell and every cell apex has
/// level <= 2t.
Cutting build_cutting(std::span<const Point3> set, std::size_t t, const CuttingOptions& opts = {});

/// A cutting with the given apexes whose member lists are recomputed by
/// brute force. Used to check stored apexes with verify_cutting.
Cutting cutting_from_apexes(std::span<const Point3> set, std::size_t t, std::span<const Point3> apexes,
                            const Point3& bound);

/// Some cell whose apex dominates q, or nullptr. nullptr implies level(q) > t.
/// Coordinates above the domain bound are clamped to it.
const Cell* locate_cell(const Cutting& cut, const Point3& q);
std::optional<std::uint32_t> locate_cell_index(const Cutting& cut, const Point3& q);

struct CuttingReport {
  bool ok = true;
  std::vector<std::string> violations;
  std::optional<Point3> witness_point;
  std::optional<std::size_t> witness_cell;

  void fail(std::string what);
};

/// Default size constant for the `cells <= c_size * n / t + 1` check.
inline constexpr double kDefaultSizeConstant = 8.0;

/// Exhaustive check of both cutting conditions over the rank grid of `set`
/// inside [0, bound]^3, plus member lists, local ranks and the size bound.
/// Intended for n up to a few hundred points.
CuttingReport verify_cutting(std::span<const Point3> set, std::size_t t, const Cutting& cut,
                             double c_size = kDefaultSizeConstant);

/// For every cell of `inner`, the index of a cell of `outer` whose apex
/// dominates it. Throws std::logic_error if some inner cell has no container,
/// which means one of the cuttings is invalid.
std::vector<std::uint32_t> containing_cell_map(const Cutting& inner, const Cutting& outer);

namespace detail {

/// Apex in class-index space: (I, J, K) selects the I-th x class, J-th y
/// class and K-th z class of the input, each in [0, m].
struct ClassApex {
  std::uint32_t i;
  std::uint32_t j;
  std::uint32_t k;
};

/// The z-decreasing sweep behind build_cutting, exposed for tests.
/// `xr`, `yr`, `zr` are 1-based per-axis ranks of the m input points.
std::vector<ClassApex> sweep_apexes(std::span<const std::uint32_t> xr, std::span<const std::uint32_t> yr,
                                    std::span<const std::uint32_t> zr, std::size_t t);

}  // namespace detail

}  // namespace rrk
