#pragma once

#include <vector>

#include "mlge/graph.hpp"
#include "mlge/rng.hpp"

namespace mlge::test {

// Erdos-Renyi-ish random graph by edge count; may come out smaller after
// dedup/self-loop removal.
inline Graph random_graph(VertexId n, EdgeId edges, Rng& rng) {
    std::vector<std::pair<VertexId, VertexId>> pairs;
    pairs.reserve(edges);
    for (EdgeId i = 0; i < edges; ++i)
        pairs.emplace_back(static_cast<VertexId>(bounded(rng, n)),
                           static_cast<VertexId>(bounded(rng, n)));
    return Graph::from_edges(n, std::move(pairs));
}

inline Graph from_pairs(VertexId n, std::vector<std::pair<VertexId, VertexId>> pairs) {
    return Graph::from_edges(n, std::move(pairs));
}

// Path 0-1-2-...-(n-1).
inline Graph path_graph(VertexId n) {
    std::vector<std::pair<VertexId, VertexId>> pairs;
    for (VertexId v = 0; v + 1 < n; ++v) pairs.emplace_back(v, v + 1);
    return Graph::from_edges(n, std::move(pairs));
}

// Hub 0 with `leaves` spokes.
inline Graph star_graph(VertexId leaves) {
    std::vector<std::pair<VertexId, VertexId>> pairs;
    for (VertexId v = 1; v <= leaves; ++v) pairs.emplace_back(VertexId{0}, v);
    return Graph::from_edges(leaves + 1, std::move(pairs));
}

inline Graph complete_graph(VertexId n) {
    std::vector<std::pair<VertexId, VertexId>> pairs;
    for (VertexId u = 0; u < n; ++u)
        for (VertexId v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
    return Graph::from_edges(n, std::move(pairs));
}

// Applies a relabeling perm[old] = new.
inline Graph relabel(const Graph& g, const std::vector<VertexId>& perm) {
    std::vector<std::pair<VertexId, VertexId>> pairs;
    for (auto [u, v] : g.edges()) pairs.emplace_back(perm[u], perm[v]);
    return Graph::from_edges(g.vertex_count(), std::move(pairs));
}

} // namespace mlge::test
