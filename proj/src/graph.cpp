#include "urnflow/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "urnflow/error.hpp"

namespace urnflow {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::parse: return "ParseError";
        case Errc::validation: return "ValidationError";
        case Errc::invalid_initial: return "InvalidInitial";
        case Errc::overflow: return "Overflow";
        case Errc::not_successor: return "NotSuccessor";
        case Errc::degenerate_pair: return "DegeneratePair";
        case Errc::domain: return "DomainError";
        case Errc::left_domain: return "LeftDomain";
        case Errc::sparse_trajectory: return "SparseTrajectory";
        case Errc::not_regular_bipartite: return "NotRegularBipartite";
        case Errc::not_balanced_bipartite: return "NotBalancedBipartite";
        case Errc::too_large: return "TooLarge";
        case Errc::no_convergence: return "NoConvergence";
        case Errc::inconsistent_classification: return "InconsistentClassification";
        case Errc::degenerate_point: return "DegeneratePoint";
        case Errc::uniqueness_violation: return "UniquenessViolation";
        case Errc::io: return "IOError";
    }
    return "Error";
}

Graph::Graph(std::size_t vertex_count, std::vector<Edge> edges, std::string name)
    : edges_(std::move(edges)), adjacency_(vertex_count), name_(std::move(name)) {
    if (vertex_count == 0) throw Error(Errc::validation, "graph has no vertices");
    if (edges_.empty()) throw Error(Errc::validation, "graph has no edges");

    std::set<std::pair<Vertex, Vertex>> seen;
    for (const auto& e : edges_) {
        if (e.u >= vertex_count || e.v >= vertex_count)
            throw Error(Errc::validation, "edge endpoint out of range");
        if (e.u == e.v)
            throw Error(Errc::validation, "self-loop at vertex " + std::to_string(e.u + 1));
        auto key = std::minmax(e.u, e.v);
        if (!seen.insert(key).second)
            throw Error(Errc::validation, "duplicate edge " + std::to_string(key.first + 1) + " " +
                                              std::to_string(key.second + 1));
        adjacency_[e.u].push_back(e.v);
        adjacency_[e.v].push_back(e.u);
    }

    std::vector<bool> reached(vertex_count, false);
    std::vector<Vertex> stack{0};
    reached[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        Vertex i = stack.back();
        stack.pop_back();
        for (Vertex j : adjacency_[i]) {
            if (!reached[j]) {
                reached[j] = true;
                ++count;
                stack.push_back(j);
            }
        }
    }
    if (count != vertex_count) throw Error(Errc::validation, "graph is disconnected");
}

bool Graph::adjacent(Vertex i, Vertex j) const {
    const auto& nb = adjacency_.at(i);
    return std::find(nb.begin(), nb.end(), j) != nb.end();
}

namespace {

Graph from_one_based(const std::vector<std::pair<long long, long long>>& raw, std::size_t m,
                     std::string name) {
    std::vector<bool> used(m, false);
    std::vector<Edge> edges;
    edges.reserve(raw.size());
    for (auto [i, j] : raw) {
        if (i < 1 || j < 1 || static_cast<std::size_t>(i) > m || static_cast<std::size_t>(j) > m)
            throw Error(Errc::validation, "vertex id out of range 1.." + std::to_string(m));
        edges.push_back({static_cast<Vertex>(i - 1), static_cast<Vertex>(j - 1)});
        used[i - 1] = used[j - 1] = true;
    }
    for (std::size_t k = 0; k < m; ++k)
        if (!used[k]) throw Error(Errc::validation, "vertex id gap at " + std::to_string(k + 1));
    return Graph(m, std::move(edges), std::move(name));
}

bool parse_positive(std::string_view token, long long& out) {
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

}  // namespace

Graph parse_edge_list(std::string_view text, std::string name) {
    std::vector<std::pair<long long, long long>> raw;
    long long max_id = 0;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        line = line.substr(0, line.find('#'));
        pos = end + 1;
        ++line_no;

        std::vector<std::string_view> tokens;
        std::size_t k = 0;
        while (k < line.size()) {
            while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k]))) ++k;
            std::size_t start = k;
            while (k < line.size() && !std::isspace(static_cast<unsigned char>(line[k]))) ++k;
            if (k > start) tokens.push_back(line.substr(start, k - start));
        }
        if (tokens.empty()) continue;

        long long i = 0, j = 0;
        if (tokens.size() != 2 || !parse_positive(tokens[0], i) || !parse_positive(tokens[1], j) ||
            i < 1 || j < 1)
            throw Error(Errc::parse, "line " + std::to_string(line_no) +
                                         ": expected two positive integers \"i j\"");
        raw.emplace_back(i, j);
        max_id = std::max({max_id, i, j});
    }
    if (raw.empty()) throw Error(Errc::parse, "no edges in document");
    return from_one_based(raw, static_cast<std::size_t>(max_id), std::move(name));
}

Graph parse_graph_json(std::string_view text, std::string name) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::parse, e.what());
    }
    if (!doc.is_object() || !doc.contains("m") || !doc.contains("edges") ||
        !doc["m"].is_number_integer() || !doc["edges"].is_array())
        throw Error(Errc::parse, "expected {\"m\": int, \"edges\": [[i, j], ...]}");
    long long m = doc["m"].get<long long>();
    if (m < 1) throw Error(Errc::validation, "m must be positive");

    std::vector<std::pair<long long, long long>> raw;
    for (const auto& e : doc["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw Error(Errc::parse, "edge entries must be [i, j] integer pairs");
        raw.emplace_back(e[0].get<long long>(), e[1].get<long long>());
    }
    if (raw.empty()) throw Error(Errc::validation, "graph has no edges");
    return from_one_based(raw, static_cast<std::size_t>(m), std::move(name));
}

Graph parse_graph(std::string_view text, std::string name) {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '{')
        return parse_graph_json(text, std::move(name));
    return parse_edge_list(text, std::move(name));
}

Graph load_graph(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string stem = path;
    if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
    if (auto dot = stem.find_last_of('.'); dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
    return parse_graph(buf.str(), stem);
}

GraphClass classify_graph(const Graph& g) {
    const std::size_t m = g.vertex_count();
    GraphClass cls;

    // BFS 2-coloring from vertex 0 so that the part containing it is A.
    std::vector<int> color(m, -1);
    color[0] = 0;
    std::vector<Vertex> queue{0};
    bool bipartite = true;
    for (std::size_t head = 0; head < queue.size() && bipartite; ++head) {
        Vertex i = queue[head];
        for (Vertex j : g.neighbors(i)) {
            if (color[j] < 0) {
                color[j] = 1 - color[i];
                queue.push_back(j);
            } else if (color[j] == color[i]) {
                bipartite = false;
                break;
            }
        }
    }
    cls.bipartite = bipartite;
    if (bipartite) {
        Bipartition parts;
        for (Vertex i = 0; i < m; ++i) (color[i] == 0 ? parts.a : parts.b).push_back(i);
        cls.balanced = parts.a.size() == parts.b.size();
        cls.bipartition = std::move(parts);
    }

    std::size_t d0 = g.degree(0);
    cls.regular = true;
    for (Vertex i = 1; i < m; ++i)
        if (g.degree(i) != d0) cls.regular = false;
    if (cls.regular) cls.degree_r = d0;
    return cls;
}

std::vector<double> bipartite_sign_vector(const Graph& g, const GraphClass& cls) {
    if (!cls.bipartition) throw Error(Errc::validation, "graph is not bipartite");
    std::vector<double> l(g.vertex_count(), -1.0);
    for (Vertex i : cls.bipartition->a) l[i] = 1.0;
    return l;
}

}  // namespace urnflow
