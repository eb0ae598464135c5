#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tiling/config.hpp"
#include "tiling/height.hpp"
#include "tiling/oracle.hpp"
#include "tiling/planar.hpp"
#include "tiling/render.hpp"
#include "tiling/stats.hpp"
#include "tiling/ust.hpp"
#include "tiling/walk.hpp"

namespace py = pybind11;
using namespace tiling;

namespace {

using Pair = std::pair<int64_t, int64_t>;

std::vector<Pair> coords(const std::vector<hex::HexCoord>& v) {
  std::vector<Pair> out;
  for (auto& c : v) out.emplace_back(c.m, c.n);
  return out;
}

HexSubgraph region(const std::vector<Pair>& whites, const std::vector<Pair>& blacks) {
  std::vector<hex::HexCoord> w, b;
  for (auto [m, n] : whites) w.push_back(hex::white(m, n));
  for (auto [m, n] : blacks) b.push_back(hex::black(m, n));
  return HexSubgraph::from_coords(w, b);
}

py::int_ big(const oracle::BigInt& x) { return py::int_(py::str(x.str())); }

}  // namespace

PYBIND11_MODULE(_tiling, m) {
  m.doc() = "Lozenge tilings, T-graphs and their random walks";
  m.attr("__version__") = "1.0.0";

  py::register_exception<Error>(m, "TilingError");

  py::class_<HexSubgraph>(m, "Region")
      .def(py::init(&region), py::arg("whites"), py::arg("blacks"))
      .def_property_readonly("whites", [](const HexSubgraph& g) { return coords(g.whites); })
      .def_property_readonly("blacks", [](const HexSubgraph& g) { return coords(g.blacks); })
      .def_property_readonly("num_edges", &HexSubgraph::num_edges)
      .def("neighbors", [](const HexSubgraph& g, int w) { return g.white_nb.at(w); }, py::arg("white"),
           "black indices in slots a, b, c (-1 if absent)")
      .def("balanced", &HexSubgraph::balanced)
      .def("simply_connected", [](const HexSubgraph& g) { return simply_connected(g); })
      .def("__len__", [](const HexSubgraph& g) { return g.whites.size(); });

  m.def("hexagon_region", &hexagon_region, py::arg("a"), py::arg("b"), py::arg("c"));
  m.def(
      "random_region",
      [](uint64_t seed, int a, int b, int c, int removals) {
        std::mt19937_64 rng(seed);
        return random_region(rng, a, b, c, removals);
      },
      py::arg("seed"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("removals"));
  m.def("count_matchings", [](const HexSubgraph& g) { return big(oracle::count_matchings(g)); });
  m.def("macmahon", [](int a, int b, int c) { return big(oracle::macmahon(a, b, c)); });
  m.def(
      "enumerate_matchings",
      [](const HexSubgraph& g, uint64_t limit) {
        std::vector<HexMatching> out;
        oracle::enumerate_matchings(g, [&](const HexMatching& x) { out.push_back(x); }, limit);
        return out;
      },
      py::arg("region"), py::arg("limit") = 100000);
  m.def("edge_probabilities", &oracle::edge_probabilities, "per white, probabilities of slots a, b, c");
  m.def("is_perfect", &is_perfect);
  m.def(
      "heights",
      [](const HexSubgraph& g, const HexMatching& x) {
        const HexHeight h = height_from_matching(g, x);
        std::map<Pair, double> out;
        for (auto& f : g.faces())
          if (h.has(f)) out[{f.m, f.n}] = h.value(f);
        return out;
      },
      "heights of the faces, 0 at the central face");
  m.def(
      "render_tiling",
      [](const HexSubgraph& g, const HexMatching& x, bool heights, double scale) {
        render::Style s;
        s.heights = heights;
        s.scale = scale;
        return render::render_tiling(g, x, s);
      },
      py::arg("region"), py::arg("matching"), py::arg("heights") = false, py::arg("scale") = 20.0);

  py::class_<planar::PlanarParams>(m, "PlanarParams")
      .def(py::init([](cplx A, cplx B, cplx C, cplx lambda) {
             planar::PlanarParams p{A, B, C, lambda};
             p.check();
             return p;
           }),
           py::arg("A") = cplx(0, 0), py::arg("B") = cplx(1, 0), py::arg("C") = cplx(0.5, kSqrt3 / 2),
           py::arg("lam") = cplx(1, 0))
      .def_readonly("A", &planar::PlanarParams::A)
      .def_readonly("B", &planar::PlanarParams::B)
      .def_readonly("C", &planar::PlanarParams::C)
      .def_readonly("lam", &planar::PlanarParams::lambda);

  py::class_<TGraph>(m, "TGraph")
      .def_readonly("points", &TGraph::points)
      .def_readonly("segments", &TGraph::segments)
      .def_property_readonly("boundary",
                             [](const TGraph& g) { return std::vector<bool>(g.boundary.begin(), g.boundary.end()); })
      .def_property_readonly("num_vertices", &TGraph::num_vertices)
      .def_property_readonly("num_segments", &TGraph::num_segments)
      .def("is_degenerate", &TGraph::degenerate)
      .def("validate",
           [](const TGraph& g) {
             std::vector<std::string> out;
             for (auto& v : validate_tgraph(g).violations) out.push_back(v.kind + ": " + v.detail);
             return out;
           },
           "violations; empty when valid")
      .def("rates",
           [](const TGraph& g, int v) {
             std::vector<std::pair<int, double>> out;
             for (auto& r : walk::rates(g, v)) out.emplace_back(r.target, r.rate);
             return out;
           })
      .def("nearest_interior_vertex", &stats::nearest_interior_vertex);

  m.def(
      "planar_patch",
      [](const planar::PlanarParams& p, double radius, double mesh) {
        return planar::build_whole_plane_patch(p, planar::Window::disk(0, radius * mesh), mesh).graph;
      },
      py::arg("params"), py::arg("radius"), py::arg("mesh") = 1.0);

  m.def(
      "sample_walk",
      [](const TGraph& g, int start, double t_max, uint64_t seed, uint64_t index) {
        walk::StopRule rule;
        rule.t_max = t_max;
        auto p = walk::sample_path(g, start, rule, seed, index);
        return py::make_tuple(p.vertices, p.times, p.end_time);
      },
      py::arg("graph"), py::arg("start"), py::arg("t_max"), py::arg("seed") = 1, py::arg("index") = 0,
      "(vertices, arrival times, end time)");
  m.def(
      "wilson_tree", [](const TGraph& g, uint64_t seed, uint64_t index) { return ust::wilson_sample(g, seed, index).next; },
      py::arg("graph"), py::arg("seed") = 1, py::arg("index") = 0, "next vertex per vertex, -1 on the boundary");

  m.def("disk_green", &stats::disk_green, py::arg("u"), py::arg("v"));

  py::class_<config::RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("delta", &config::RunConfig::delta)
      .def_readwrite("seed", &config::RunConfig::seed)
      .def_readwrite("samples", &config::RunConfig::samples)
      .def_readwrite("threads", &config::RunConfig::threads)
      .def_readwrite("NM", &config::RunConfig::NM)
      .def_readwrite("eps_short", &config::RunConfig::eps_short)
      .def_readwrite("project", &config::RunConfig::project)
      .def_readwrite("u_radius", &config::RunConfig::u_radius)
      .def_readwrite("output", &config::RunConfig::output)
      .def_readwrite("tolerances", &config::RunConfig::tolerances)
      .def("validate", &config::RunConfig::validate)
      .def("to_text", [](const config::RunConfig& c) { return config::to_text(c); })
      .def("hash", [](const config::RunConfig& c) { return config::config_hash(c); })
      .def("__eq__", &config::RunConfig::operator==);
  m.def("parse_config", &config::parse, py::arg("text"));
}
