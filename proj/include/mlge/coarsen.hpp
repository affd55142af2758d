#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mlge/graph.hpp"
#include "mlge/rng.hpp"

namespace mlge {

// Surjective vertex -> super-vertex assignment for one coarsening level.
struct CoarseningMap {
    std::vector<VertexId> map;
    VertexId coarse_count = 0;

    // Throws std::logic_error unless map is total over [0, coarse_count)
    // and every super-vertex id occurs.
    void validate_partition() const;
};

enum class Strategy { Anti, Random, Novel, Louvain };

Strategy strategy_from_name(const std::string& name); // throws std::invalid_argument
std::string strategy_name(Strategy s);

struct CoarsenConfig {
    Strategy strategy = Strategy::Novel;
    bool use_ordering = true;
    bool use_hub_restriction = true;
    // Hub degree threshold = multiplier * |E_i|/|V_i|. 2.0 blocks only
    // above-average-degree pairs; 1.0 is the literal half-average rule.
    double hub_threshold_multiplier = 2.0;
    int max_depth = 15;
    VertexId min_vertices = 100;
    double stop_threshold = 0.83; // stop once |V_{i+1}|/|V_i| exceeds this
    std::uint64_t seed = 0;
    int threads = 1;
};

struct LevelStats {
    VertexId vertices = 0;
    EdgeId edges = 0;
    double coarsen_ms = 0; // time to produce this level from the previous one
};

struct Hierarchy {
    std::vector<Graph> graphs;        // G_0 .. G_{D-1}
    std::vector<CoarseningMap> maps;  // maps[i] : V_i -> V_{i+1}
    std::vector<LevelStats> per_level_stats;

    int depth() const { return static_cast<int>(graphs.size()); }
};

// Greedy agglomeration: each unmapped vertex in processing order opens a
// cluster and absorbs its still-unmapped neighbors, subject to the hub^2
// rule. Deterministic for a given graph and flags. `centers_out`, when
// given, receives the cluster centers in cluster id order.
CoarseningMap coarsen_novel_serial(const Graph& g, bool use_ordering, bool use_hub_restriction,
                                   double hub_threshold_multiplier,
                                   std::vector<VertexId>* centers_out = nullptr);

// Same contract, but threads race to claim vertices with CAS; the resulting
// clustering is schedule-dependent yet always a valid partition of star
// clusters respecting the hub^2 rule.
CoarseningMap coarsen_novel_parallel(const Graph& g, bool use_ordering, bool use_hub_restriction,
                                     double hub_threshold_multiplier, int threads,
                                     std::vector<VertexId>* centers_out = nullptr);

CoarseningMap coarsen_novel(const Graph& g, const CoarsenConfig& cfg,
                            std::vector<VertexId>* centers_out = nullptr);

// Pairs each vertex with a uniformly drawn unmapped non-neighbor (bounded
// rejection budget); adjacent vertices never share a super-vertex.
CoarseningMap coarsen_anti(const Graph& g, Rng& rng);

// Pairs each vertex with a uniformly drawn unmapped vertex using at most
// |Gamma(v)| draws; clusters never exceed two vertices.
CoarseningMap coarsen_random(const Graph& g, Rng& rng);

// Unit-weight single-phase Louvain partition, densely re-labeled.
CoarseningMap coarsen_louvain(const Graph& g, Rng& rng);

// MultiEdgeCollapse: map endpoints, drop self-loops, collapse duplicates.
Graph contract_serial(const Graph& g, const CoarseningMap& m);
Graph contract_parallel(const Graph& g, const CoarseningMap& m, int threads);
Graph contract(const Graph& g, const CoarseningMap& m, int threads = 1);

// Repeated strategy+contract with the configured stopping rules.
Hierarchy build_hierarchy(const Graph& g, const CoarsenConfig& cfg);

// Per-level stats as a JSON array [{level, vertices, edges, coarsen_ms}].
std::string stats_json(const Hierarchy& h);

// "MLCM" binary serialization, little-endian; 32-bit entries whenever
// coarse_count fits.
void write_coarsening_map(const CoarseningMap& m, std::uint32_t level, std::ostream& out);
void write_coarsening_map_file(const CoarseningMap& m, std::uint32_t level, const std::string& path);
std::pair<CoarseningMap, std::uint32_t> read_coarsening_map(std::istream& in);
std::pair<CoarseningMap, std::uint32_t> read_coarsening_map_file(const std::string& path);

} // namespace mlge
