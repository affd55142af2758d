#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mlge {

using VertexId = std::uint32_t;
using EdgeId = std::uint64_t;

// Raised for malformed input data (bad tokens, truncated files, ...).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_ = 0;
};

// Undirected simple graph in CSR form. Immutable after construction;
// safe to share across threads.
//
// Each undirected edge is stored in both directions. Neighbor slices are
// sorted and deduplicated, and there are no self-loops.
class Graph {
public:
    Graph() = default;

    // Builds a graph from an arbitrary edge list over vertices
    // [0, vertex_count). Self-loops and duplicates are dropped and the
    // adjacency is symmetrized.
    static Graph from_edges(VertexId vertex_count,
                            std::vector<std::pair<VertexId, VertexId>> edges);

    // Trusted constructor for callers that already hold a valid CSR.
    static Graph from_csr(std::vector<EdgeId> offsets, std::vector<VertexId> neighbors);

    VertexId vertex_count() const { return static_cast<VertexId>(offsets_.empty() ? 0 : offsets_.size() - 1); }
    EdgeId edge_count() const { return neighbors_.size() / 2; }

    EdgeId degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

    std::span<const VertexId> neighbors(VertexId v) const {
        return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
    }

    bool has_edge(VertexId u, VertexId v) const;

    const std::vector<EdgeId>& offsets() const { return offsets_; }
    const std::vector<VertexId>& adjacency() const { return neighbors_; }

    // Canonical edge list (u < v), ordered by (u, v).
    std::vector<std::pair<VertexId, VertexId>> edges() const;

    // Structural sanity check: symmetric, sorted, loop-free adjacency.
    // Throws std::logic_error on violation.
    void validate() const;

    bool operator==(const Graph&) const = default;

private:
    std::vector<EdgeId> offsets_{0};
    std::vector<VertexId> neighbors_;
};

struct LoadResult {
    Graph graph;
    // Dense id -> id used in the input file.
    std::vector<std::uint64_t> original_ids;
};

// Parses a whitespace-separated edge list ("u v" per line). Lines starting
// with one of `comment_prefixes` are skipped. Vertices are re-labeled to a
// dense 0-based range in first-appearance order.
LoadResult load_edge_list(std::istream& in, std::string_view comment_prefixes = "#%");
LoadResult load_edge_list_file(const std::string& path, std::string_view comment_prefixes = "#%");

// Writes "u v" lines in an order chosen so that re-loading a graph whose
// ids are already in first-appearance order reproduces it exactly.
void write_edge_list(const Graph& g, std::ostream& out);

// (|V_prev| - |V_next|) / |V_prev|; throws std::domain_error on empty prev.
double shrink_rate(const Graph& prev, const Graph& next);

// Undirected edge count over vertex count; throws std::domain_error on an
// empty graph.
double density(const Graph& g);

// Binary cache ("MLGE"); little-endian, 32-bit neighbor ids when the vertex
// count permits.
void write_graph_cache(const Graph& g, std::ostream& out);
void write_graph_cache_file(const Graph& g, const std::string& path);
Graph read_graph_cache(std::istream& in);
Graph read_graph_cache_file(const std::string& path);

} // namespace mlge
