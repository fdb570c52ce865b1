#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace rrk {

/// Rank-space coordinate. Valid point coordinates lie in [1, n]; 0 and n+1
/// act as impossible bounds.
using Coord = std::int32_t;
using PointId = std::uint32_t;

template <typename T>
struct BasicPoint3 {
  T x{};
  T y{};
  T z{};

  friend bool operator==(const BasicPoint3&, const BasicPoint3&) = default;
};

/// A 4D point. `w` is the range-tree axis; `(x, y, z)` is queried by dominance.
template <typename T>
struct BasicPoint4 {
  T x{};
  T y{};
  T z{};
  T w{};
  PointId id{};

  BasicPoint3<T> xyz() const { return {x, y, z}; }
  friend bool operator==(const BasicPoint4&, const BasicPoint4&) = default;
};

/// The closed region (-inf, a] x (-inf, b] x (-inf, c].
template <typename T>
struct BasicDominanceBox3 {
  T a{};
  T b{};
  T c{};

  BasicPoint3<T> corner() const { return {a, b, c}; }
  friend bool operator==(const BasicDominanceBox3&, const BasicDominanceBox3&) = default;
};

/// A 5-sided query: a dominance box on (x, y, z) and a closed interval on w.
template <typename T>
struct BasicQuery5 {
  BasicDominanceBox3<T> box;
  T wlo{};
  T whi{};

  friend bool operator==(const BasicQuery5&, const BasicQuery5&) = default;
};

using Point3 = BasicPoint3<Coord>;
using Point4 = BasicPoint4<Coord>;
using DominanceBox3 = BasicDominanceBox3<Coord>;
using Query5 = BasicQuery5<Coord>;

using RawPoint3 = BasicPoint3<double>;
using RawPoint4 = BasicPoint4<double>;
using RawQuery5 = BasicQuery5<double>;

/// True iff every coordinate of q is >= the matching coordinate of p.
template <typename T>
constexpr bool dominates(const BasicPoint3<T>& q, const BasicPoint3<T>& p) {
  return q.x >= p.x && q.y >= p.y && q.z >= p.z;
}

template <typename T>
constexpr bool in_box(const BasicDominanceBox3<T>& box, const BasicPoint3<T>& p) {
  return dominates(box.corner(), p);
}

template <typename T>
constexpr bool in_query(const BasicQuery5<T>& q, const BasicPoint4<T>& p) {
  return in_box(q.box, p.xyz()) && q.wlo <= p.w && p.w <= q.whi;
}

/// Number of points of `set` dominated by `q`.
template <typename T>
std::size_t level(const BasicPoint3<T>& q, std::span<const BasicPoint3<T>> set) {
  return static_cast<std::size_t>(std::count_if(
      set.begin(), set.end(), [&](const BasicPoint3<T>& p) { return dominates(q, p); }));
}

template <typename T>
std::size_t level(const BasicPoint3<T>& q, const std::vector<BasicPoint3<T>>& set) {
  return level(q, std::span<const BasicPoint3<T>>(set));
}

inline Point3 componentwise_min(const Point3& a, const Point3& b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}

template <class Archive, typename T>
void serialize(Archive& ar, BasicPoint3<T>& p) {
  ar(p.x, p.y, p.z);
}

template <class Archive, typename T>
void serialize(Archive& ar, BasicPoint4<T>& p) {
  ar(p.x, p.y, p.z, p.w, p.id);
}

}  // namespace rrk
