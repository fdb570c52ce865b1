#include "rrk/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rrk {

const char* to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kUniform: return "uniform";
    case DatasetKind::kClustered: return "clustered";
    case DatasetKind::kDiagonal: return "diagonal";
    case DatasetKind::kAdversarialDuplicates: return "adversarial-duplicates";
  }
  return "?";
}

DatasetKind dataset_kind_from_string(const std::string& name) {
  for (DatasetKind k : all_dataset_kinds()) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown dataset kind '" + name + "'");
}

std::vector<DatasetKind> all_dataset_kinds() {
  return {DatasetKind::kUniform, DatasetKind::kClustered, DatasetKind::kDiagonal, DatasetKind::kAdversarialDuplicates};
}

Dataset make_dataset(std::vector<RawPoint4> raw, std::string generator, std::uint64_t seed) {
  Dataset ds;
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i].id = static_cast<PointId>(i + 1);
  ds.raw = std::move(raw);
  ds.generator = std::move(generator);
  ds.seed = seed;
  if (!ds.raw.empty()) {
    auto red = rank_reduce(ds.raw);
    ds.points = std::move(red.points);
    ds.dictionary = std::move(red.dictionary);
  }
  return ds;
}

Dataset generate_dataset(DatasetKind kind, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_dataset: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<RawPoint4> raw(n);
  switch (kind) {
    case DatasetKind::kUniform:
      for (auto& p : raw) p = {unit_double(rng), unit_double(rng), unit_double(rng), unit_double(rng)};
      break;
    case DatasetKind::kClustered: {
      std::vector<RawPoint4> centres(8);
      for (auto& c : centres) c = {unit_double(rng), unit_double(rng), unit_double(rng), unit_double(rng)};
      auto off = [&]() { return (unit_double(rng) - 0.5) * 0.06; };
      for (auto& p : raw) {
        const auto& c = centres[rng() % centres.size()];
        p = {c.x + off(), c.y + off(), c.z + off(), c.w + off()};
      }
      break;
    }
    case DatasetKind::kDiagonal:
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = static_cast<double>(i + 1);
        raw[i] = {v, v, v, v};
      }
      break;
    case DatasetKind::kAdversarialDuplicates: {
      const std::uint64_t values = std::max<std::uint64_t>(1, n / 8);
      auto draw = [&]() { return static_cast<double>(rng() % values); };
      for (auto& p : raw) p = {draw(), draw(), draw(), draw()};
      break;
    }
  }
  return make_dataset(std::move(raw), to_string(kind), seed);
}

std::vector<RawQuery5> random_queries(const Dataset& ds, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<RawQuery5> out;
  out.reserve(count);
  const std::size_t n = ds.size();
  const double inf = std::numeric_limits<double>::infinity();
  auto pick = [&](auto get) {
    const std::uint64_t r = rng() % 16;
    if (n == 0 || r == 0) return -inf;
    if (r == 1) return inf;
    const double v = get(ds.raw[rng() % n]);
    // sometimes step just off the value so both sides of a tie are probed
    if (r == 2) return std::nextafter(v, -inf);
    return v;
  };
  for (std::size_t i = 0; i < count; ++i) {
    RawQuery5 q;
    q.box.a = pick([](const RawPoint4& p) { return p.x; });
    q.box.b = pick([](const RawPoint4& p) { return p.y; });
    q.box.c = pick([](const RawPoint4& p) { return p.z; });
    double lo = pick([](const RawPoint4& p) { return p.w; });
    double hi = pick([](const RawPoint4& p) { return p.w; });
    if (lo > hi && rng() % 8 != 0) std::swap(lo, hi);
    q.wlo = lo;
    q.whi = hi;
    out.push_back(q);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

template <std::size_t N>
bool next_record(std::istream& in, std::size_t& line_no, double (&v)[N], const char* what) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    for (auto& x : v) {
      std::string tok;
      if (!(ls >> tok)) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": expected " + std::to_string(N) + " values for a " + what);
      }
      try {
        std::size_t used = 0;
        x = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad number '" + tok + "'");
      }
    }
    std::string extra;
    if (ls >> extra) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": trailing data '" + extra + "'");
    }
    return true;
  }
  return false;
}

void write_value(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

std::vector<RawPoint4> read_points(std::istream& in) {
  std::vector<RawPoint4> out;
  std::size_t line_no = 0;
  double v[4];
  while (next_record(in, line_no, v, "point")) {
    out.push_back({v[0], v[1], v[2], v[3], static_cast<PointId>(out.size() + 1)});
  }
  return out;
}

void write_points(std::ostream& out, const std::vector<RawPoint4>& points) {
  for (const auto& p : points) {
    write_value(out, p.x);
    out << ' ';
    write_value(out, p.y);
    out << ' ';
    write_value(out, p.z);
    out << ' ';
    write_value(out, p.w);
    out << '\n';
  }
}

std::vector<RawQuery5> read_queries(std::istream& in) {
  std::vector<RawQuery5> out;
  std::size_t line_no = 0;
  double v[5];
  while (next_record(in, line_no, v, "query")) out.push_back({{v[0], v[1], v[2]}, v[3], v[4]});
  return out;
}

void write_queries(std::ostream& out, const std::vector<RawQuery5>& queries) {
  for (const auto& q : queries) {
    const double v[5] = {q.box.a, q.box.b, q.box.c, q.wlo, q.whi};
    for (int i = 0; i < 5; ++i) {
      if (i) out << ' ';
      write_value(out, v[i]);
    }
    out << '\n';
  }
}

void write_results(std::ostream& out, const std::vector<std::vector<PointId>>& results) {
  for (const auto& ids : results) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) out << ' ';
      out << ids[i];
    }
    out << '\n';
  }
}

std::vector<std::vector<PointId>> read_results(std::istream& in) {
  std::vector<std::vector<PointId>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<PointId> ids;
    PointId id;
    while (ls >> id) ids.push_back(id);
    out.push_back(std::move(ids));
  }
  return out;
}

}  // namespace rrk
