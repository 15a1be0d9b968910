#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <array>
#include <sstream>

#include "tammes/contact.hpp"
#include "tammes/embed.hpp"
#include "tammes/geom.hpp"
#include "tammes/maximality.hpp"
#include "tammes/pipeline.hpp"
#include "tammes/planar.hpp"
#include "tammes/prune.hpp"

namespace py = pybind11;
using namespace tammes;

namespace {

using Point = std::array<double, 3>;

Configuration make_config(const std::vector<Point>& pts) {
  std::vector<UnitVector> v;
  v.reserve(pts.size());
  for (const auto& p : pts) v.emplace_back(p[0], p[1], p[2]);
  return Configuration(std::move(v));
}

std::vector<Point> points_of(const Configuration& c) {
  std::vector<Point> out;
  for (const auto& p : c.points()) out.push_back({p.x(), p.y(), p.z()});
  return out;
}

py::dict polygon_dict(const geom::SphericalPolygon& p) {
  py::dict d;
  std::vector<Point> v;
  for (const auto& x : p.vertices) v.push_back({x.x(), x.y(), x.z()});
  d["vertices"] = v;
  d["angles"] = p.angles;
  d["side"] = p.side;
  return d;
}

py::dict verdict_dict(const Verdict& v) {
  py::dict d;
  d["canonical"] = v.canonical;
  d["method"] = v.method;
  d["verdict"] = v.verdict;
  py::dict details;
  for (const auto& [k, x] : v.details) details[py::str(k)] = x;
  d["details"] = details;
  d["note"] = v.note;
  return d;
}

}  // namespace

PYBIND11_MODULE(_tammes, m) {
  m.doc() = "Tammes problem toolkit: optimizer, graph census and maximality tests";

  py::register_exception<geom::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<geom::NoClosure>(m, "NoClosure", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidEmbedding>(m, "InvalidEmbedding", PyExc_ValueError);
  py::register_exception<BadHeader>(m, "BadHeader", PyExc_ValueError);
  py::register_exception<RootNotBracketed>(m, "RootNotBracketed", PyExc_RuntimeError);

  // Geometry
  m.def("alpha", &geom::alpha, py::arg("d"));
  m.def("rho", &geom::rho, py::arg("u"), py::arg("d"));
  m.def("square_angle", &geom::square_angle, py::arg("d"));
  m.def("rhombus_pair_sum_bounds", &geom::rhombus_pair_sum_bounds, py::arg("d_lo"), py::arg("d_hi"));
  m.def("fejes_toth_bound", &geom::fejes_toth_bound, py::arg("n"));
  m.def(
      "polygon_embed",
      [](const std::vector<double>& free, double d, int sides) {
        return polygon_dict(geom::polygon_embed(free, d, sides));
      },
      py::arg("free_angles"), py::arg("d"), py::arg("m"));
  m.def(
      "lambda_max_min",
      [](const std::vector<double>& free, double d, int sides) {
        return geom::lambda_max_min(geom::polygon_embed(free, d, sides));
      },
      py::arg("free_angles"), py::arg("d"), py::arg("m"), "lambda of the polygon built by polygon_embed");

  // Configurations
  py::class_<Configuration>(m, "Configuration")
      .def(py::init(&make_config), py::arg("points"))
      .def_property_readonly("n", &Configuration::n)
      .def_property_readonly("psi", &Configuration::psi)
      .def_property_readonly("points", &points_of)
      .def("to_json", &Configuration::to_json)
      .def_static("from_json", &Configuration::from_json, py::arg("text"))
      .def("save", &Configuration::save, py::arg("path"))
      .def_static("load", &Configuration::load, py::arg("path"))
      .def("__len__", &Configuration::n)
      .def("__repr__", [](const Configuration& c) {
        std::ostringstream s;
        s << "Configuration(n=" << c.n() << ", psi=" << c.psi() << ")";
        return s.str();
      });

  m.def("polyhedron", [](const std::string& name) { return polyhedron(name); }, py::arg("name"));
  m.def(
      "contact_edges", [](const Configuration& c, double tol) { return contact_graph(c, tol).edges; },
      py::arg("config"), py::arg("tol") = kContactTol);
  m.def("is_irreducible", &is_irreducible, py::arg("config"), py::arg("tol") = kContactTol);

  // Plane graphs
  py::class_<PlanarGraph>(m, "PlanarGraph")
      .def_static("from_rotation", &PlanarGraph::from_rotation, py::arg("rotation"),
                  py::arg("isolated") = std::vector<std::pair<int, int>>{})
      .def_static("from_faces", &PlanarGraph::from_faces, py::arg("n"), py::arg("faces"),
                  py::arg("isolated") = std::vector<std::pair<int, int>>{})
      .def_property_readonly("n", &PlanarGraph::n)
      .def_property_readonly("rotation", py::overload_cast<>(&PlanarGraph::rotation, py::const_))
      .def_property_readonly("faces", &PlanarGraph::faces)
      .def_property_readonly("isolated", &PlanarGraph::isolated)
      .def("edges", &PlanarGraph::edges)
      .def("num_edges", &PlanarGraph::num_edges)
      .def("degree", &PlanarGraph::degree, py::arg("v"))
      .def("remove_edges", &PlanarGraph::remove_edges, py::arg("edges"))
      .def("canonical_form", [](const PlanarGraph& g) { return canonical_form(g); });

  m.def("canonical_form", &canonical_form, py::arg("graph"));
  m.def("read_planar_code_file", &read_planar_code_file, py::arg("path"));
  m.def("write_planar_code_file", &write_planar_code_file, py::arg("path"), py::arg("graphs"));
  m.def("prop31_filter", &prop31_filter, py::arg("graph"));
  m.def("planar_contact_graph", &planar_contact_graph, py::arg("config"), py::arg("tol") = kContactTol);

  // Pipeline pieces
  m.def(
      "tammes_optimize",
      [](int n, int restarts, std::uint64_t seed, int threads) {
        OptimizeOptions o;
        o.restarts = restarts;
        o.seed = seed;
        o.threads = threads;
        py::gil_scoped_release release;
        return tammes_optimize(n, o).best;
      },
      py::arg("n"), py::arg("restarts") = 10, py::arg("seed") = 1, py::arg("threads") = 1);

  m.def(
      "prune_graph",
      [](const PlanarGraph& g, double d_lo, double d_hi, int max_depth, long max_nodes) {
        PruneOptions o;
        o.d_lo = d_lo;
        o.d_hi = d_hi;
        o.max_depth = max_depth;
        o.max_nodes = max_nodes;
        PruneOutcome r;
        {
          py::gil_scoped_release release;
          r = prune_graph(g, o);
        }
        py::dict d;
        d["eliminated"] = r.eliminated;
        d["reason"] = r.reason;
        d["depth"] = r.depth;
        d["nodes"] = r.nodes;
        d["budget_exhausted"] = r.budget_exhausted;
        py::list boxes;
        for (const auto& b : r.survivors) boxes.append(py::make_tuple(b.lo, b.hi));
        d["survivors"] = boxes;
        return d;
      },
      py::arg("graph"), py::arg("d_lo"), py::arg("d_hi"), py::arg("max_depth") = 40, py::arg("max_nodes") = 4096);

  m.def(
      "embed_graph",
      [](const PlanarGraph& g, double d_lo, double d_hi) {
        const auto [sys, box] = build_system(g, d_lo, d_hi);
        const auto r = nonlinear_embed(sys, box);
        py::dict d;
        d["status"] = to_string(r.status);
        d["d"] = r.d;
        d["residual"] = r.residual;
        d["detail"] = r.detail;
        d["config"] = r.config ? py::cast(*r.config) : py::none();
        return d;
      },
      py::arg("graph"), py::arg("d_lo"), py::arg("d_hi"), "solve the graph's angle system over a d window");

  m.def(
      "stress_feasible",
      [](const Configuration& c, const std::vector<std::pair<int, int>>& edges, double pad) {
        return stress_lp_feasible(tangent_frames(c, edges, pad)).feasible;
      },
      py::arg("config"), py::arg("edges"), py::arg("pad") = 1e-4);

  m.def(
      "verify_maximal",
      [](const PlanarGraph& g, const Configuration& c, double pad) {
        VerifyOptions o;
        o.pad = pad;
        return verdict_dict(verify_maximal(g, c, o));
      },
      py::arg("graph"), py::arg("config"), py::arg("pad") = 1e-4);

  // The fourteen-point analysis
  m.def("gamma14_graph", &gamma14_graph);
  m.def("gamma14_variants", [](const PlanarGraph& base) { return gamma14_variants(base); }, py::arg("base"));
  m.def("gamma2_theta", &gamma2_theta, py::arg("x"));
  m.def(
      "gamma2_curve",
      [](double x) {
        const auto c = gamma2_curve(x);
        py::dict d;
        d["x"] = c.x;
        d["d"] = c.d;
        d["u"] = std::vector<double>(c.u.begin(), c.u.end());
        d["max_residual"] = c.max_residual();
        return d;
      },
      py::arg("x"));
  m.def("gamma2_f13_derivative", []() {
    const auto r = gamma2_f13_derivative();
    py::dict d;
    d["f13"] = r.f13;
    d["f12"] = r.f12;
    d["rho_product"] = r.rho_product;
    return d;
  });
}
