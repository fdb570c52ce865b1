#pragma once

#include <algorithm>
#include <vector>

#include "rrk/geom.hpp"

namespace rrk {

/// Reference answer by linear scan: sorted ids of all points inside `q`.
template <typename T>
std::vector<PointId> oracle_report(std::span<const BasicPoint4<T>> points, const BasicQuery5<T>& q) {
  std::vector<PointId> ids;
  for (const auto& p : points) {
    if (in_query(q, p)) ids.push_back(p.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

template <typename T>
std::vector<PointId> oracle_report(const std::vector<BasicPoint4<T>>& points, const BasicQuery5<T>& q) {
  return oracle_report(std::span<const BasicPoint4<T>>(points), q);
}

}  // namespace rrk
