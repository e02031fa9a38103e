#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace urnflow {

using Vertex = std::size_t;

struct Edge {
    Vertex u;
    Vertex v;
};

/// Finite simple connected undirected graph on vertices 0..m-1.
///
/// Files and all user-facing output use 1-based ids; the conversion happens
/// only in the parsers and emitters. Edge order is the order of appearance in
/// the source document and is what the simulator iterates over.
class Graph {
public:
    /// Validates simplicity and connectivity; throws Error(validation).
    Graph(std::size_t vertex_count, std::vector<Edge> edges, std::string name = {});

    std::size_t vertex_count() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<Vertex>& neighbors(Vertex i) const { return adjacency_.at(i); }
    std::size_t degree(Vertex i) const { return adjacency_.at(i).size(); }
    bool adjacent(Vertex i, Vertex j) const;
    const std::string& name() const noexcept { return name_; }

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<Vertex>> adjacency_;
    std::string name_;
};

struct Bipartition {
    std::vector<Vertex> a;  // part containing vertex 0
    std::vector<Vertex> b;
};

struct GraphClass {
    bool bipartite = false;
    std::optional<Bipartition> bipartition;
    bool balanced = false;
    bool regular = false;
    std::optional<std::size_t> degree_r;

    bool balanced_bipartite() const noexcept { return bipartite && balanced; }
    bool regular_bipartite() const noexcept { return bipartite && regular; }
};

/// Edge-list document: one "i j" per line, '#' comments and blank lines skipped.
Graph parse_edge_list(std::string_view text, std::string name = {});

/// JSON document {"m": int, "edges": [[i, j], ...]}.
Graph parse_graph_json(std::string_view text, std::string name = {});

/// Dispatches on content: a document whose first non-space character is '{'
/// is read as JSON, anything else as an edge list.
Graph parse_graph(std::string_view text, std::string name = {});

/// Reads and parses a file; throws Error(io) when unreadable.
Graph load_graph(const std::string& path);

GraphClass classify_graph(const Graph& g);

/// +1 on part A, -1 on part B. Requires a bipartite class.
std::vector<double> bipartite_sign_vector(const Graph& g, const GraphClass& cls);

}  // namespace urnflow
