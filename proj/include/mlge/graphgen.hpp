#pragma once

#include <cstdint>

#include "mlge/graph.hpp"

namespace mlge {

// Degree-corrected planted-partition generator (Chung-Lu style): expected
// degrees follow a truncated power law, vertices sit in communities, and
// each sampled edge keeps its second endpoint inside the first endpoint's
// community with probability 1 - mixing. Vertex labels are shuffled so id
// order carries no degree signal.
struct GenConfig {
    VertexId vertices = 100'000;
    EdgeId target_edges = 400'000;
    double degree_exponent = 2.3;  // tail exponent of expected degrees
    double max_degree_fraction = 0.02; // cap on expected degree, as share of |V|
    VertexId community_count = 512;
    double community_size_exponent = 0.8; // size skew across communities
    double mixing = 0.2;
    // Keep only the giant component (re-labeled densely); the sampled
    // low-weight slots otherwise leave isolated vertices behind.
    bool largest_component = false;
    std::uint64_t seed = 0;
};

Graph generate_community_graph(const GenConfig& cfg);

// Largest connected component, densely re-labeled (order preserved).
Graph largest_component(const Graph& g);

} // namespace mlge
