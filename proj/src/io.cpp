#include "urnflow/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "urnflow/error.hpp"

namespace urnflow {

std::string format_double(double v) {
    std::string s = fmt::format("{}", v);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

namespace {

void emit(const Json& j, int indent, int depth, std::string& out) {
    const bool pretty = indent >= 0;
    auto newline = [&](int d) {
        if (!pretty) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += Json(key).dump();
                out += pretty ? ": " : ":";
                emit(value, indent, depth + 1, out);
            }
            newline(depth);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            bool flat = true;
            for (const auto& v : j) flat = flat && !v.is_structured();
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += flat && pretty ? ", " : ",";
                first = false;
                if (!flat) newline(depth + 1);
                emit(v, indent, depth + 1, out);
            }
            if (!flat) newline(depth);
            out += ']';
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        default:
            out += j.dump();
            return;
    }
}

}  // namespace

std::string dump_json(const Json& doc, int indent) {
    std::string out;
    emit(doc, indent, 0, out);
    out += '\n';
    return out;
}

Json point_json(const Point& x) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(x[i]);
    return a;
}

Json support_json(const Support& s) {
    Json a = Json::array();
    for (Vertex v : s) a.push_back(v + 1);
    return a;
}

Json to_json(const Graph& g, const GraphClass& cls) {
    Json j;
    j["bipartite"] = cls.bipartite;
    j["balanced"] = cls.balanced;
    j["regular"] = cls.regular;
    j["r"] = cls.degree_r ? Json(*cls.degree_r) : Json(nullptr);
    j["m"] = g.vertex_count();
    j["N"] = g.edge_count();
    if (cls.bipartition) {
        j["A"] = support_json(cls.bipartition->a);
        j["B"] = support_json(cls.bipartition->b);
    }
    return j;
}

Json to_json(const InteriorInterval& iv) {
    Json j;
    j["base"] = point_json(iv.base);
    j["direction"] = point_json(iv.direction);
    j["eta_min"] = iv.eta_min;
    j["eta_max"] = iv.eta_max;
    j["max_sample_residual"] = iv.max_sample_residual;
    return j;
}

Json to_json(const Equilibrium& eq) {
    Json j;
    j["point"] = point_json(eq.point);
    j["support"] = support_json(eq.support);
    j["residual"] = eq.residual;
    j["classification"] = stability_name(eq.classification.stability);
    Json signs = Json::array();
    for (const auto& s : eq.classification.sign_test)
        signs.push_back(Json{{"vertex", s.vertex + 1}, {"dL", s.value}});
    j["sign_test"] = std::move(signs);
    j["spectrum"] = eq.classification.spectrum;
    j["consistent"] = eq.classification.consistent;
    if (eq.interval) j["interval"] = to_json(*eq.interval);
    return j;
}

Json to_json(const std::vector<Equilibrium>& eqs) {
    Json a = Json::array();
    for (const auto& e : eqs) a.push_back(to_json(e));
    return a;
}

Json to_json(const OmegaSegment& seg) {
    Json j;
    j["p_plus_q"] = seg.p_plus_q;
    j["A"] = support_json(seg.part_a);
    j["B"] = support_json(seg.part_b);
    j["endpoint_a"] = point_json(seg.endpoint_a);
    j["endpoint_b"] = point_json(seg.endpoint_b);
    j["midpoint"] = point_json(seg.midpoint);
    return j;
}

Json to_json(const LimitResult& limit) {
    Json j;
    j["kind"] = limit_kind_name(limit.kind);
    Json payload;
    switch (limit.kind) {
        case LimitKind::unique_point: payload = to_json(*limit.point); break;
        case LimitKind::omega_segment: payload = to_json(*limit.omega); break;
        case LimitKind::interior_interval: payload = to_json(*limit.interval); break;
        case LimitKind::finite_set: payload["equilibria"] = to_json(limit.candidates); break;
    }
    j["payload"] = std::move(payload);
    j["note"] = limit.note;
    return j;
}

Json to_json(const EnsembleSummary& summary) {
    Json j;
    j["graph"] = summary.graph;
    j["runs"] = summary.runs;
    j["steps"] = summary.steps;
    j["seed"] = summary.seed;
    j["checkpoints"] = summary.checkpoints;
    Json finals = Json::array();
    for (const auto& p : summary.final_points) finals.push_back(point_json(p));
    j["final_points"] = std::move(finals);
    j["distances"] = summary.distances;
    j["distance_series"] = summary.distance_series;
    j["stats"] = Json{{"mean", summary.stats.mean},
                      {"median", summary.stats.median},
                      {"max", summary.stats.max}};
    if (!summary.omega_histogram.empty()) {
        j["omega"] = Json{{"coordinates", summary.omega_coordinates},
                          {"histogram", summary.omega_histogram},
                          {"min", summary.omega_min},
                          {"max", summary.omega_max}};
    }
    return j;
}

Json to_json(const FlowResult& result) {
    Json j;
    j["t"] = result.t;
    j["point"] = point_json(result.endpoint);
    j["steps"] = result.steps;
    j["max_violation"] = result.max_violation;
    j["min_delta_L"] = result.min_delta_lyapunov;
    j["L_start"] = result.lyapunov_start;
    j["L_end"] = result.lyapunov_end;
    j["c"] = result.domain_c;
    return j;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "n,tau";
    const auto m = traj.points.empty() ? 0 : traj.points.front().size();
    for (Eigen::Index i = 0; i < m; ++i) out += fmt::format(",x_{}", i + 1);
    out += '\n';
    for (std::size_t k = 0; k < traj.points.size(); ++k) {
        out += std::to_string(traj.steps[k]);
        out += ',';
        out += format_double(traj.tau[k]);
        for (Eigen::Index i = 0; i < m; ++i) {
            out += ',';
            out += format_double(traj.points[k][i]);
        }
        out += '\n';
    }
    return out;
}

std::string gap_csv(const std::vector<GapSample>& gaps) {
    std::string out = "t,gap\n";
    for (const auto& g : gaps) out += format_double(g.t) + "," + format_double(g.gap) + "\n";
    return out;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io, "cannot open " + path + " for writing");
    out << contents;
    if (!out) throw Error(Errc::io, "write to " + path + " failed");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace urnflow
