#include "rrk/rank_space.hpp"

#include <algorithm>
#include <unordered_set>

namespace rrk {

RankDictionary::RankDictionary(std::array<std::vector<Key>, kAxes> keys) : keys_(std::move(keys)) {}

Coord RankDictionary::rank_upper(Axis axis, double value) const {
  const auto& k = keys_[axis];
  auto it = std::upper_bound(k.begin(), k.end(), value,
                             [](double v, const Key& key) { return v < key.value; });
  return static_cast<Coord>(it - k.begin());
}

Coord RankDictionary::rank_lower(Axis axis, double value) const {
  const auto& k = keys_[axis];
  auto it = std::lower_bound(k.begin(), k.end(), value,
                             [](const Key& key, double v) { return key.value < v; });
  return static_cast<Coord>(it - k.begin()) + 1;
}

double RankDictionary::value_of(Axis axis, Coord rank) const {
  if (rank < 1 || static_cast<std::size_t>(rank) > keys_[axis].size()) {
    throw std::out_of_range("rank outside dictionary");
  }
  return keys_[axis][static_cast<std::size_t>(rank - 1)].value;
}

RankReduction rank_reduce(std::span<const RawPoint4> points) {
  if (points.empty()) {
    throw std::invalid_argument("rank_reduce: empty point set");
  }
  {
    std::unordered_set<PointId> seen;
    for (const auto& p : points) {
      if (!seen.insert(p.id).second) {
        throw std::invalid_argument("rank_reduce: duplicate point id");
      }
    }
  }

  const std::size_t n = points.size();
  RankReduction out;
  out.points.resize(n);
  std::array<std::vector<RankDictionary::Key>, RankDictionary::kAxes> keys;
  std::vector<std::size_t> order(n);

  auto axis_value = [](const RawPoint4& p, int axis) {
    switch (axis) {
      case 0: return p.x;
      case 1: return p.y;
      case 2: return p.z;
      default: return p.w;
    }
  };

  for (int axis = 0; axis < RankDictionary::kAxes; ++axis) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = axis_value(points[a], axis);
      const double vb = axis_value(points[b], axis);
      if (va != vb) return va < vb;
      return points[a].id < points[b].id;
    });
    keys[axis].reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
      const auto& p = points[order[r]];
      keys[axis].push_back({axis_value(p, axis), p.id});
      auto& q = out.points[order[r]];
      const Coord rank = static_cast<Coord>(r + 1);
      switch (axis) {
        case 0: q.x = rank; break;
        case 1: q.y = rank; break;
        case 2: q.z = rank; break;
        default: q.w = rank; break;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) out.points[i].id = points[i].id;
  out.dictionary = RankDictionary(std::move(keys));
  return out;
}

Query5 query_to_rank_space(const RawQuery5& q, const RankDictionary& dict) {
  using A = RankDictionary;
  Query5 r;
  r.box.a = dict.rank_upper(A::kX, q.box.a);
  r.box.b = dict.rank_upper(A::kY, q.box.b);
  r.box.c = dict.rank_upper(A::kZ, q.box.c);
  r.wlo = dict.rank_lower(A::kW, q.wlo);
  r.whi = dict.rank_upper(A::kW, q.whi);
  return r;
}

RawPoint4 point_from_rank_space(const Point4& p, const RankDictionary& dict) {
  using A = RankDictionary;
  return {dict.value_of(A::kX, p.x), dict.value_of(A::kY, p.y), dict.value_of(A::kZ, p.z),
          dict.value_of(A::kW, p.w), p.id};
}

}  // namespace rrk
