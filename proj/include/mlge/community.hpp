#pragma once

#include <cstdint>
#include <vector>

#include "mlge/graph.hpp"
#include "mlge/rng.hpp"

namespace mlge {

// Weighted view used by modularity optimization. Self-loop weight collects
// collapsed intra-cluster edges; a self-loop of weight w counts 2w both in
// the vertex's weighted degree and in its intra-community edge sum, which
// keeps Q invariant when a community is contracted to a single vertex.
struct WeightedGraph {
    Graph base;
    std::vector<double> edge_weights; // parallel to base.adjacency()
    std::vector<double> self_weights; // one per vertex
    double total_weight = 0;          // m = undirected edge weight + self weight

    static WeightedGraph unit(Graph g);

    // Adjacency weight + 2 * self weight.
    double weighted_degree(VertexId v) const;
};

struct Partition {
    std::vector<VertexId> community;
    VertexId community_count = 0;

    static Partition singletons(VertexId n);
    // Re-labels community ids to a dense 0-based range (order of first use).
    void compact();
};

// Q per the weighted modularity formula; throws std::domain_error when the
// graph has zero total weight.
double modularity(const WeightedGraph& wg, const Partition& p);

struct MoveRecord {
    VertexId vertex;
    VertexId from;
    VertexId to;
    double predicted_gain;
};

// One sweep over the vertices in randomized order; every vertex greedily
// moves to the neighboring community with the largest positive gain (ties:
// lowest community id). Returns the number of moves. `trace`, when given,
// records each executed move with its predicted gain.
std::size_t louvain_local_move(const WeightedGraph& wg, Partition& p, Rng& rng,
                               std::vector<MoveRecord>* trace = nullptr);

// Local-move passes until a fixed point (or max_passes); result has dense ids.
Partition louvain(const WeightedGraph& wg, int max_passes, Rng& rng);

// JSON array, vertex index -> community id.
std::string partition_json(const Partition& p);

} // namespace mlge
