// Python bindings for the graphrbm core.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "graphrbm/decomposition.hpp"
#include "graphrbm/error.hpp"
#include "graphrbm/fem.hpp"
#include "graphrbm/harness.hpp"
#include "graphrbm/io.hpp"
#include "graphrbm/manufactured.hpp"
#include "graphrbm/metric_graph.hpp"
#include "graphrbm/rbm.hpp"
#include "graphrbm/timestep.hpp"

namespace py = pybind11;
using namespace graphrbm;

namespace {

std::vector<std::string> vertex_names(const MetricGraph& g, const std::vector<VertexId>& vs) {
  std::vector<std::string> out;
  for (VertexId v : vs) out.push_back(g.vertex_name(v));
  return out;
}

py::dict trajectory_dict(const Trajectory& t) {
  Eigen::MatrixXd states(static_cast<Eigen::Index>(t.states.size()),
                         t.states.empty() ? 0 : t.states.front().size());
  for (std::size_t i = 0; i < t.states.size(); ++i) states.row(static_cast<Eigen::Index>(i)) = t.states[i];
  py::dict d;
  d["times"] = t.times;
  d["steps"] = t.steps;
  d["states"] = states;
  d["schedule"] = t.schedule;
  d["seed"] = t.seed;
  d["max_active_dofs"] = t.max_active_dofs;
  d["mean_active_dofs"] = t.mean_active_dofs;
  d["max_factor_nnz"] = t.max_factor_nnz;
  return d;
}

py::dict record_dict(const ExperimentRecord& r) {
  py::dict d;
  d["scheme"] = r.scheme;
  d["h"] = r.h;
  d["dt"] = r.dt;
  d["realizations"] = r.realizations;
  d["error1"] = r.error1;
  d["error2"] = r.error2;
  d["variance"] = r.variance;
  d["avg_time_s"] = r.avg_time_s;
  d["mem_proxy"] = r.mem_proxy;
  d["peak_rss_mb"] = r.peak_rss_mb ? py::cast(*r.peak_rss_mb) : py::none();
  d["seed"] = r.seed;
  d["dofs"] = r.dofs;
  d["max_active_dofs"] = r.max_active_dofs;
  d["mean_active_dofs"] = r.mean_active_dofs;
  return d;
}

StudyProblem problem_from(const std::string& graph_path, const std::string& batch_path) {
  ExperimentSpec spec;
  spec.graph_path = graph_path;
  spec.batch_path = batch_path;
  return load_problem(spec);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Random batch method for parabolic problems on metric graphs";

  static py::handle error_type = py::exception<Error>(m, "GraphRbmError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(errc_name(e.code()));
      exc.attr("numerical") = is_numerical(e.code());
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<Scheme>(m, "Scheme")
      .def_static("parse", &parse_scheme, py::arg("name"), py::arg("theta") = 0.75)
      .def_property_readonly("name", &Scheme::name)
      .def_readonly("theta", &Scheme::theta)
      .def("__repr__", [](const Scheme& s) { return "Scheme(" + s.name() + ")"; });

  py::class_<MetricGraph>(m, "MetricGraph")
      .def_property_readonly("num_vertices", &MetricGraph::num_vertices)
      .def_property_readonly("num_edges", &MetricGraph::num_edges)
      .def_property_readonly("vertices",
                             [](const MetricGraph& g) {
                               std::vector<std::string> out;
                               for (std::size_t i = 0; i < g.num_vertices(); ++i) out.push_back(g.vertex_name(vertex_id(i)));
                               return out;
                             })
      .def_property_readonly("edges",
                             [](const MetricGraph& g) {
                               std::vector<std::tuple<std::string, std::string, std::string, double>> out;
                               for (std::size_t i = 0; i < g.num_edges(); ++i) {
                                 const Edge& e = g.edge(edge_id(i));
                                 out.emplace_back(g.edge_name(edge_id(i)), g.vertex_name(e.tail), g.vertex_name(e.head),
                                                  e.length);
                               }
                               return out;
                             })
      .def_property_readonly("boundary", [](const MetricGraph& g) { return vertex_names(g, g.boundary_vertices()); });

  m.def(
      "build_graph",
      [](const std::vector<std::tuple<std::string, std::string, double>>& edges,
         const std::vector<std::string>& boundary) {
        std::vector<EdgeSpec> specs;
        for (const auto& [tail, head, length] : edges) specs.push_back({tail, head, length, ""});
        return build_graph(specs, boundary);
      },
      py::arg("edges"), py::arg("boundary"), "Graph from (tail, head, length) triples; edges are named e1, e2, ...");
  m.def("demo_graph", &demo_graph);
  m.def("load_graph", [](const std::string& path) { return load_graph_file(path).graph; }, py::arg("path"));

  py::class_<StudyProblem>(m, "Problem")
      .def_readonly("graph", &StudyProblem::graph)
      .def_property_readonly("parts",
                             [](const StudyProblem& p) {
                               std::vector<std::vector<std::string>> out;
                               for (std::size_t i = 0; i < p.partition.num_parts(); ++i) {
                                 out.emplace_back();
                                 for (EdgeId e : p.partition.part_edges(i)) out.back().push_back(p.graph.edge_name(e));
                               }
                               return out;
                             })
      .def_property_readonly("batches", [](const StudyProblem& p) { return p.family.batches; })
      .def_property_readonly("probs", [](const StudyProblem& p) { return p.family.probs; })
      .def_property_readonly("pi", [](const StudyProblem& p) { return p.family.pi; })
      .def(
          "exact",
          [](const StudyProblem& p, const std::string& edge, double x, double t) {
            return p.solution.value(p.graph.find_edge(edge), x, t);
          },
          py::arg("edge"), py::arg("x"), py::arg("t"));

  m.def("demo_problem", &demo_problem, "Demo graph, its four-part partition, option-2 batches, manufactured data");
  m.def("load_problem", &problem_from, py::arg("graph_path") = "", py::arg("batch_path") = "",
        "Graph and batch JSON files; empty paths fall back to the demo");

  m.def(
      "check",
      [](const StudyProblem& p) {
        const AssumptionA1Report r = check_assumption_a1(p.partition, p.family);
        py::dict d;
        d["a1_holds"] = r.holds;
        d["a1_violations"] = vertex_names(p.graph, r.violations);
        d["pi"] = p.family.pi;
        return d;
      },
      py::arg("problem"));

  m.def(
      "solve",
      [](const StudyProblem& p, const std::string& scheme, double dt, double t_final, int nodes_per_edge, double theta,
         int snapshot_stride) {
        const Discretization disc(p.graph, Mesh{nodes_per_edge}, p.coeffs);
        py::gil_scoped_release release;
        Trajectory t = run_full(disc, parse_scheme(scheme, theta), dt, t_final, snapshot_stride);
        ErrorAccumulator acc(disc, p.solution.as_function());
        acc.add(t);
        const double err = acc.result().error1;
        py::gil_scoped_acquire acquire;
        py::dict d = trajectory_dict(t);
        d["error"] = err;
        return d;
      },
      py::arg("problem"), py::arg("scheme") = "ie", py::arg("dt") = 0.002, py::arg("t_final") = 1.0,
      py::arg("nodes_per_edge") = 100, py::arg("theta") = 0.75, py::arg("snapshot_stride") = 1,
      "Deterministic full-graph solve; 'error' is sup_t ||y - z||^2 over stored times");

  m.def(
      "rbm",
      [](const StudyProblem& p, double h, const std::string& scheme, double dt, double t_final, std::uint64_t seed,
         int nodes_per_edge, double theta, int snapshot_stride) {
        const Discretization disc(p.graph, Mesh{nodes_per_edge}, p.coeffs);
        RbmConfig cfg;
        cfg.h = h;
        cfg.dt = dt;
        cfg.t_final = t_final;
        cfg.scheme = parse_scheme(scheme, theta);
        cfg.seed = seed;
        cfg.snapshot_stride = snapshot_stride;
        py::gil_scoped_release release;
        Trajectory t = run_rbm(disc, p.partition, p.family, cfg);
        ErrorAccumulator acc(disc, p.solution.as_function());
        acc.add(t);
        const double err = acc.result().error1;
        py::gil_scoped_acquire acquire;
        py::dict d = trajectory_dict(t);
        d["error"] = err;
        return d;
      },
      py::arg("problem"), py::arg("h"), py::arg("scheme") = "ie", py::arg("dt") = 0.002, py::arg("t_final") = 1.0,
      py::arg("seed") = 1, py::arg("nodes_per_edge") = 100, py::arg("theta") = 0.75, py::arg("snapshot_stride") = 1,
      "One RBM realization with window length h");

  m.def(
      "study",
      [](const StudyProblem& p, const std::vector<double>& h, const std::vector<std::string>& schemes, double dt,
         double t_final, std::size_t realizations, std::uint64_t seed, int nodes_per_edge, unsigned threads,
         bool include_full, double theta) {
        ExperimentSpec spec;
        spec.schemes.clear();
        for (const auto& s : schemes) spec.schemes.push_back(parse_scheme(s, theta));
        spec.h_list = h;
        spec.dt = dt;
        spec.t_final = t_final;
        spec.realizations = realizations;
        spec.seed = seed;
        spec.nodes_per_edge = nodes_per_edge;
        spec.threads = threads;
        spec.include_full = include_full;
        std::vector<ExperimentRecord> rows;
        {
          py::gil_scoped_release release;
          rows = run_study(p, spec);
        }
        py::list out;
        for (const auto& r : rows) out.append(record_dict(r));
        return out;
      },
      py::arg("problem"), py::arg("h"), py::arg("schemes") = std::vector<std::string>{"ie"}, py::arg("dt") = 0.002,
      py::arg("t_final") = 1.0, py::arg("realizations") = 20, py::arg("seed") = 1, py::arg("nodes_per_edge") = 100,
      py::arg("threads") = 1, py::arg("include_full") = true, py::arg("theta") = 0.75,
      "Monte-Carlo sweep; one dict per CSV row");

  m.def(
      "lambda_profile",
      [](const StudyProblem& p, double t_final, std::size_t points) {
        const LambdaProfile l =
            lambda_profile(p.solution, p.coeffs, p.partition, p.family, uniform_times(t_final, points));
        return py::make_tuple(l.times, l.values, l.l1_norm);
      },
      py::arg("problem"), py::arg("t_final") = 1.0, py::arg("points") = 2001,
      "(times, values, L1 norm) of the variance functional");

  m.def(
      "fit_slope",
      [](const std::vector<double>& h, const std::vector<double>& e) {
        const SlopeFit f = fit_slope(h, e);
        return py::make_tuple(f.slope, f.intercept);
      },
      py::arg("h"), py::arg("error"), "(slope, intercept) of log(error) against log(h)");

  m.attr("CSV_HEADER") = kCsvHeader;
}
