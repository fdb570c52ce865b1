#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <chrono>

#include "rrk/dataset.hpp"
#include "rrk/oracle.hpp"
#include "rrk/serialize.hpp"

namespace py = pybind11;
using namespace rrk;

namespace {

std::vector<RawPoint4> to_raw(py::array_t<double, py::array::c_style | py::array::forcecast> pts) {
  if (pts.ndim() != 2 || pts.shape(1) != 4) throw std::invalid_argument("points must have shape (n, 4)");
  auto a = pts.unchecked<2>();
  std::vector<RawPoint4> raw(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) raw[i] = {a(i, 0), a(i, 1), a(i, 2), a(i, 3), 0};
  return raw;
}

py::dict stats_dict(const QueryStats& st) {
  py::dict d;
  d["canonical_units"] = st.canonical_units;
  d["nodes_visited"] = st.nodes_visited;
  d["cells_probed"] = st.cells_probed;
  d["small_dom_touched"] = st.small_dom_touched;
  d["points_decoded"] = st.points_decoded;
  d["translate_decodes"] = st.translate_decodes;
  d["decode_hops_max"] = st.decode_hops_max;
  d["reported"] = st.reported;
  return d;
}

// An index in original coordinates: the stored structure plus its rank dictionary.
class Index {
 public:
  explicit Index(StoredIndex s) : s_(std::move(s)) {
    if (!s_.dictionary) throw std::invalid_argument("index file has no rank dictionary");
  }

  static Index build(py::array_t<double, py::array::c_style | py::array::forcecast> pts, const std::string& structure,
                     std::size_t rho, std::size_t t0) {
    const Structure kind = structure_from_string(structure);
    auto raw = to_raw(pts);
    if (raw.empty()) throw std::invalid_argument("need at least one point");
    const Dataset ds = make_dataset(std::move(raw));
    StoredIndex s;
    s.structure = kind;
    s.dictionary = ds.dictionary;
    py::gil_scoped_release release;
    if (kind == Structure::kLinear) {
      LinearConfig c;
      c.rho = rho;
      c.t0 = t0;
      s.linear = LinearIndex::build(ds.points, c);
    } else {
      FastConfig c;
      c.rho = rho;
      c.t0 = t0;
      s.fast = FastIndex::build(ds.points, c);
    }
    return Index(std::move(s));
  }

  std::vector<PointId> query(double a, double b, double c, double wlo, double whi, QueryStats* st = nullptr) const {
    const Query5 q = query_to_rank_space(RawQuery5{{a, b, c}, wlo, whi}, *s_.dictionary);
    return s_.linear ? s_.linear->query(q, st) : s_.fast->query(q, st);
  }

  py::tuple query_stats(double a, double b, double c, double wlo, double whi) const {
    QueryStats st;
    auto ids = query(a, b, c, wlo, whi, &st);
    return py::make_tuple(ids, stats_dict(st));
  }

  bool any(double a, double b, double c, double wlo, double whi) const {
    const Query5 q = query_to_rank_space(RawQuery5{{a, b, c}, wlo, whi}, *s_.dictionary);
    return s_.linear ? s_.linear->any(q) : s_.fast->any(q);
  }

  py::dict space() const {
    const SpaceReport r = s_.space();
    py::dict d;
    d["design_bits"] = r.design_bits;
    d["machine_bytes"] = r.machine_bytes;
    d["design_bits_total"] = r.design_bits_total();
    d["machine_bytes_total"] = r.machine_bytes_total();
    return d;
  }

  py::dict audit() const {
    const AuditReport r = s_.linear ? s_.linear->audit() : s_.fast->audit();
    py::dict d;
    d["ok"] = r.ok();
    d["failures"] = r.failures;
    d["decode_hops_max"] = r.decode_hops_max;
    d["decode_hop_bound"] = r.decode_hop_bound;
    py::dict checks;
    for (const auto& [name, c] : r.checks) checks[py::str(name)] = py::make_tuple(c.total, c.passed);
    d["checks"] = checks;
    return d;
  }

  std::size_t size() const { return s_.size(); }
  std::string structure() const { return to_string(s_.structure); }
  void save(const std::string& path) const { save_index(path, s_); }

 private:
  StoredIndex s_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "4D 5-sided orthogonal range reporting over shallow cuttings";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  py::class_<Index>(m, "Index")
      .def_static("build", &Index::build, py::arg("points"), py::arg("structure") = "linear", py::arg("rho") = 0,
                  py::arg("t0") = 0, "Build from an (n, 4) array of x, y, z, w. Point ids are 1..n in row order.")
      .def_static("load", [](const std::string& path) { return Index(load_index(path)); }, py::arg("path"))
      .def("save", &Index::save, py::arg("path"))
      .def("query", [](const Index& ix, double a, double b, double c, double wlo, double whi) { return ix.query(a, b, c, wlo, whi); },
           py::arg("a"), py::arg("b"), py::arg("c"), py::arg("wlo"), py::arg("whi"),
           "Ids with x <= a, y <= b, z <= c and wlo <= w <= whi, sorted.")
      .def("query_stats", &Index::query_stats, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("wlo"), py::arg("whi"))
      .def("any", &Index::any, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("wlo"), py::arg("whi"))
      .def("space", &Index::space)
      .def("audit", &Index::audit)
      .def_property_readonly("structure", &Index::structure)
      .def("__len__", &Index::size);

  m.def(
      "generate",
      [](const std::string& kind, std::size_t n, std::uint64_t seed) {
        const Dataset ds = generate_dataset(dataset_kind_from_string(kind), n, seed);
        py::array_t<double> out({static_cast<py::ssize_t>(n), py::ssize_t{4}});
        auto o = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < n; ++i) {
          o(i, 0) = ds.raw[i].x;
          o(i, 1) = ds.raw[i].y;
          o(i, 2) = ds.raw[i].z;
          o(i, 3) = ds.raw[i].w;
        }
        return out;
      },
      py::arg("kind"), py::arg("n"), py::arg("seed") = 1,
      "Dataset of kind uniform, clustered, diagonal or adversarial-duplicates as an (n, 4) array.");

  m.def(
      "oracle",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> pts, double a, double b, double c, double wlo,
         double whi) {
        auto raw = to_raw(pts);
        for (std::size_t i = 0; i < raw.size(); ++i) raw[i].id = static_cast<PointId>(i + 1);
        return oracle_report(raw, RawQuery5{{a, b, c}, wlo, whi});
      },
      py::arg("points"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("wlo"), py::arg("whi"),
      "Brute-force answer by scanning every point.");
}
