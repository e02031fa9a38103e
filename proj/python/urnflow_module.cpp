#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "urnflow/dynamics.hpp"
#include "urnflow/equilibria.hpp"
#include "urnflow/error.hpp"
#include "urnflow/graph.hpp"
#include "urnflow/io.hpp"
#include "urnflow/spectral.hpp"
#include "urnflow/urn.hpp"
#include "urnflow/verify.hpp"

namespace py = pybind11;
using namespace urnflow;

namespace {

// Structured results cross the boundary as the same JSON documents the CLI
// prints, decoded into plain dicts and lists.
py::object to_py(const Json& doc) {
    return py::module_::import("json").attr("loads")(dump_json(doc));
}

Tolerances tolerances_from(const py::dict& overrides) {
    Tolerances tol;
    for (const auto& [key, value] : overrides) {
        const auto name = py::cast<std::string>(key);
        if (!tol.set(name, py::cast<double>(value)))
            throw Error(Errc::validation, "unknown or non-positive tolerance '" + name + "'");
    }
    return tol;
}

std::vector<std::uint64_t> counts_or_unit(const Graph& g, const std::optional<std::vector<std::uint64_t>>& init) {
    return init ? *init : unit_counts(g);
}

Graph make_graph(std::size_t m, const std::vector<std::pair<std::size_t, std::size_t>>& edges, std::string name) {
    std::vector<Edge> converted;
    converted.reserve(edges.size());
    for (const auto& [u, v] : edges) {
        if (u < 1 || v < 1 || u > m || v > m)
            throw Error(Errc::validation, "vertex ids must lie in 1.." + std::to_string(m));
        converted.push_back({u - 1, v - 1});
    }
    return Graph(m, std::move(converted), std::move(name));
}

}  // namespace

PYBIND11_MODULE(urnflow, m) {
    m.doc() = "Generalized Polya urn on graphs: simulation, mean-field flow and equilibria";

    static py::handle error_type = PyErr_NewException("urnflow.UrnflowError", PyExc_RuntimeError, nullptr);
    m.attr("UrnflowError") = error_type;
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const UniquenessViolation& e) {
            py::object inst = error_type(e.what());
            inst.attr("code") = errc_name(e.code());
            inst.attr("candidates") = to_py(to_json(e.candidates()));
            PyErr_SetObject(error_type.ptr(), inst.ptr());
        } catch (const Error& e) {
            py::object inst = error_type(e.what());
            inst.attr("code") = errc_name(e.code());
            PyErr_SetObject(error_type.ptr(), inst.ptr());
        }
    });

    py::class_<Graph>(m, "Graph")
        .def(py::init(&make_graph), py::arg("m"), py::arg("edges"), py::arg("name") = "",
             "Build a graph from 1-based edge pairs.")
        .def_property_readonly("m", &Graph::vertex_count)
        .def_property_readonly("N", &Graph::edge_count)
        .def_property_readonly("name", &Graph::name)
        .def_property_readonly("edges",
                               [](const Graph& g) {
                                   std::vector<std::pair<std::size_t, std::size_t>> out;
                                   for (const auto& e : g.edges()) out.emplace_back(e.u + 1, e.v + 1);
                                   return out;
                               })
        .def("degree", [](const Graph& g, std::size_t i) {
            if (i < 1 || i > g.vertex_count()) throw py::index_error("vertex id out of range");
            return g.degree(i - 1);
        })
        .def("__repr__", [](const Graph& g) {
            return "<urnflow.Graph '" + g.name() + "' m=" + std::to_string(g.vertex_count()) +
                   " N=" + std::to_string(g.edge_count()) + ">";
        });

    m.def("parse_graph", [](const std::string& text, std::string name) { return parse_graph(text, std::move(name)); },
          py::arg("text"), py::arg("name") = "");
    m.def("load_graph", &load_graph, py::arg("path"));
    m.def("classify", [](const Graph& g) { return to_py(to_json(g, classify_graph(g))); }, py::arg("graph"));

    m.def("vector_field", &vector_field, py::arg("graph"), py::arg("x"));
    m.def("lyapunov", &lyapunov, py::arg("graph"), py::arg("x"));
    m.def("lyapunov_grad", &lyapunov_grad, py::arg("graph"), py::arg("x"));
    m.def("jacobian", &jacobian, py::arg("graph"), py::arg("v"));
    m.def(
        "spectrum",
        [](const Graph& g, const Point& v, const py::dict& tol) { return spectrum(g, v, tolerances_from(tol)); },
        py::arg("graph"), py::arg("v"), py::arg("tol") = py::dict());

    m.def(
        "find_equilibria",
        [](const Graph& g, const py::dict& tol) { return to_py(to_json(find_equilibria(g, tolerances_from(tol)))); },
        py::arg("graph"), py::arg("tol") = py::dict());
    m.def(
        "limit_object",
        [](const Graph& g, const py::dict& tol) { return to_py(to_json(limit_object(g, tolerances_from(tol)))); },
        py::arg("graph"), py::arg("tol") = py::dict());
    m.def(
        "project_to_omega",
        [](const Graph& g, const Point& x) {
            const OmegaProjection pr = project_to_omega(g, classify_graph(g), x);
            py::dict d;
            d["p"] = pr.p;
            d["distance"] = pr.distance;
            d["nearest"] = pr.nearest;
            return d;
        },
        py::arg("graph"), py::arg("x"));

    m.def(
        "flow",
        [](const Graph& g, const Point& x0, double t, double dt) { return to_py(to_json(flow(g, x0, t, dt))); },
        py::arg("graph"), py::arg("x0"), py::arg("t") = 50.0, py::arg("dt") = 1e-2);

    m.def(
        "run",
        [](const Graph& g, std::uint64_t steps, std::uint64_t seed,
           const std::optional<std::vector<std::uint64_t>>& init, std::uint64_t stride) {
            Trajectory tr;
            {
                py::gil_scoped_release release;
                tr = run(g, counts_or_unit(g, init), steps, seed, stride);
            }
            Matrix pts(static_cast<Eigen::Index>(tr.points.size()), static_cast<Eigen::Index>(g.vertex_count()));
            for (std::size_t k = 0; k < tr.points.size(); ++k)
                pts.row(static_cast<Eigen::Index>(k)) = tr.points[k].transpose();
            py::dict d;
            d["steps"] = tr.steps;
            d["tau"] = tr.tau;
            d["points"] = pts;
            d["final_counts"] = tr.final_state.counts;
            return d;
        },
        py::arg("graph"), py::arg("steps"), py::arg("seed"), py::arg("init") = py::none(), py::arg("stride") = 0);

    m.def(
        "monte_carlo",
        [](const Graph& g, std::uint64_t steps, std::uint64_t runs, std::uint64_t seed,
           const std::optional<std::vector<std::uint64_t>>& init, unsigned threads) {
            const GraphClass cls = classify_graph(g);
            const LimitResult limit = limit_object(g);
            EnsembleOptions eo;
            eo.distance = [&](const Point& x) { return distance_to_limit(g, cls, limit, x); };
            eo.threads = threads;
            EnsembleSummary s;
            {
                py::gil_scoped_release release;
                s = monte_carlo(g, counts_or_unit(g, init), steps, runs, seed, eo);
            }
            Json doc = to_json(s);
            doc["limit"] = to_json(limit);
            return to_py(doc);
        },
        py::arg("graph"), py::arg("steps"), py::arg("runs"), py::arg("seed"), py::arg("init") = py::none(),
        py::arg("threads") = 0);

    m.def(
        "verify",
        [](const Graph& g, const std::string& level, std::uint64_t seed) {
            VerifyOptions opt;
            if (level == "full") opt.level = VerifyLevel::full;
            else if (level != "quick") throw Error(Errc::validation, "level must be 'quick' or 'full'");
            opt.seed = seed;
            return to_py(to_json(run_verify(g, opt)));
        },
        py::arg("graph"), py::arg("level") = "quick", py::arg("seed") = 1);
}
