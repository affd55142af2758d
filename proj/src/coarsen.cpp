#include "mlge/coarsen.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <fstream>
#include <numeric>
#include <omp.h>
#include <sstream>
#include <stdexcept>

#include "mlge/community.hpp"

namespace mlge {

namespace {
constexpr VertexId kUnmapped = static_cast<VertexId>(-1);
}

void CoarseningMap::validate_partition() const {
    std::vector<bool> hit(coarse_count, false);
    for (VertexId c : map) {
        if (c >= coarse_count) throw std::logic_error("map value out of range");
        hit[c] = true;
    }
    for (bool b : hit)
        if (!b) throw std::logic_error("map not surjective");
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "anti") return Strategy::Anti;
    if (name == "random") return Strategy::Random;
    if (name == "novel") return Strategy::Novel;
    if (name == "louvain") return Strategy::Louvain;
    throw std::invalid_argument("unknown strategy: " + name);
}

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Anti: return "anti";
        case Strategy::Random: return "random";
        case Strategy::Novel: return "novel";
        case Strategy::Louvain: return "louvain";
    }
    return "?";
}

namespace {

// Degree-descending processing order, ascending id among equal degrees.
std::vector<VertexId> processing_order(const Graph& g, bool use_ordering) {
    std::vector<VertexId> order(g.vertex_count());
    std::iota(order.begin(), order.end(), VertexId{0});
    if (use_ordering)
        std::stable_sort(order.begin(), order.end(),
                         [&](VertexId a, VertexId b) { return g.degree(a) > g.degree(b); });
    return order;
}

double hub_threshold(const Graph& g, double multiplier) {
    return multiplier * static_cast<double>(g.edge_count()) / static_cast<double>(g.vertex_count());
}

} // namespace

CoarseningMap coarsen_novel_serial(const Graph& g, bool use_ordering, bool use_hub_restriction,
                                   double hub_threshold_multiplier,
                                   std::vector<VertexId>* centers_out) {
    const VertexId n = g.vertex_count();
    if (n == 0) throw std::invalid_argument("cannot coarsen empty graph");
    const double threshold = use_hub_restriction ? hub_threshold(g, hub_threshold_multiplier) : 0.0;

    CoarseningMap cm;
    cm.map.assign(n, kUnmapped);
    if (centers_out) centers_out->clear();

    VertexId next = 0;
    for (VertexId v : processing_order(g, use_ordering)) {
        if (cm.map[v] != kUnmapped) continue;
        const VertexId cluster = next++;
        cm.map[v] = cluster;
        if (centers_out) centers_out->push_back(v);
        const bool v_hub = static_cast<double>(g.degree(v)) > threshold;
        for (VertexId u : g.neighbors(v)) {
            if (cm.map[u] != kUnmapped) continue;
            if (use_hub_restriction && v_hub && static_cast<double>(g.degree(u)) > threshold)
                continue;
            cm.map[u] = cluster;
        }
    }
    cm.coarse_count = next;
    return cm;
}

CoarseningMap coarsen_novel_parallel(const Graph& g, bool use_ordering, bool use_hub_restriction,
                                     double hub_threshold_multiplier, int threads,
                                     std::vector<VertexId>* centers_out) {
    const VertexId n = g.vertex_count();
    if (n == 0) throw std::invalid_argument("cannot coarsen empty graph");
    const double threshold = use_hub_restriction ? hub_threshold(g, hub_threshold_multiplier) : 0.0;
    const std::vector<VertexId> order = processing_order(g, use_ordering);

    // Claim protocol: a vertex's slot moves from kUnmapped to the id of its
    // cluster's center exactly once, via CAS. Losers of the race skip.
    std::vector<std::atomic<VertexId>> owner(n);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
        owner[static_cast<std::size_t>(i)].store(kUnmapped, std::memory_order_relaxed);

#pragma omp parallel for schedule(dynamic, 2048) num_threads(threads)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        const VertexId v = order[static_cast<std::size_t>(i)];
        VertexId expected = kUnmapped;
        if (!owner[v].compare_exchange_strong(expected, v)) continue; // already absorbed
        const bool v_hub = static_cast<double>(g.degree(v)) > threshold;
        for (VertexId u : g.neighbors(v)) {
            if (use_hub_restriction && v_hub && static_cast<double>(g.degree(u)) > threshold)
                continue;
            expected = kUnmapped;
            owner[u].compare_exchange_strong(expected, v); // losing is fine
        }
    }

    // Compact center ids (ascending) into dense cluster ids.
    std::vector<VertexId> rank(n, kUnmapped);
    VertexId next = 0;
    for (VertexId v = 0; v < n; ++v)
        if (owner[v].load(std::memory_order_relaxed) == v) rank[v] = next++;
    CoarseningMap cm;
    cm.coarse_count = next;
    cm.map.resize(n);
    if (centers_out) {
        centers_out->resize(next);
        for (VertexId v = 0; v < n; ++v)
            if (rank[v] != kUnmapped) (*centers_out)[rank[v]] = v;
    }
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t v = 0; v < static_cast<std::int64_t>(n); ++v)
        cm.map[static_cast<std::size_t>(v)] =
            rank[owner[static_cast<std::size_t>(v)].load(std::memory_order_relaxed)];
    return cm;
}

CoarseningMap coarsen_novel(const Graph& g, const CoarsenConfig& cfg,
                            std::vector<VertexId>* centers_out) {
    if (cfg.threads > 1)
        return coarsen_novel_parallel(g, cfg.use_ordering, cfg.use_hub_restriction,
                                      cfg.hub_threshold_multiplier, cfg.threads, centers_out);
    return coarsen_novel_serial(g, cfg.use_ordering, cfg.use_hub_restriction,
                                cfg.hub_threshold_multiplier, centers_out);
}

CoarseningMap coarsen_anti(const Graph& g, Rng& rng) {
    const VertexId n = g.vertex_count();
    if (n == 0) throw std::invalid_argument("cannot coarsen empty graph");
    CoarseningMap cm;
    cm.map.assign(n, kUnmapped);
    VertexId next = 0;
    for (VertexId v = 0; v < n; ++v) {
        if (cm.map[v] != kUnmapped) continue;
        const VertexId cluster = next++;
        cm.map[v] = cluster;
        const std::uint64_t budget = std::max<std::uint64_t>(g.degree(v), 8);
        for (std::uint64_t t = 0; t < budget; ++t) {
            const VertexId u = static_cast<VertexId>(bounded(rng, n));
            if (u == v || cm.map[u] != kUnmapped || g.has_edge(v, u)) continue;
            cm.map[u] = cluster;
            break;
        }
    }
    cm.coarse_count = next;
    return cm;
}

CoarseningMap coarsen_random(const Graph& g, Rng& rng) {
    const VertexId n = g.vertex_count();
    if (n == 0) throw std::invalid_argument("cannot coarsen empty graph");
    CoarseningMap cm;
    cm.map.assign(n, kUnmapped);
    VertexId next = 0;
    for (VertexId v = 0; v < n; ++v) {
        if (cm.map[v] != kUnmapped) continue;
        const VertexId cluster = next++;
        cm.map[v] = cluster;
        const std::uint64_t budget = g.degree(v);
        for (std::uint64_t t = 0; t < budget; ++t) {
            const VertexId u = static_cast<VertexId>(bounded(rng, n));
            if (u == v || cm.map[u] != kUnmapped) continue;
            cm.map[u] = cluster;
            break;
        }
    }
    cm.coarse_count = next;
    return cm;
}

CoarseningMap coarsen_louvain(const Graph& g, Rng& rng) {
    if (g.vertex_count() == 0) throw std::invalid_argument("cannot coarsen empty graph");
    Partition p = louvain(WeightedGraph::unit(g), 1000, rng);
    CoarseningMap cm;
    cm.map = std::move(p.community);
    cm.coarse_count = p.community_count;
    return cm;
}

namespace {

void check_map(const Graph& g, const CoarseningMap& m) {
    if (m.map.size() != g.vertex_count())
        throw std::invalid_argument("coarsening map does not cover graph");
    for (VertexId c : m.map)
        if (c >= m.coarse_count) throw std::invalid_argument("coarsening map value out of range");
}

} // namespace

Graph contract_serial(const Graph& g, const CoarseningMap& m) {
    check_map(g, m);
    std::vector<std::pair<VertexId, VertexId>> coarse_edges;
    coarse_edges.reserve(g.edge_count());
    for (VertexId u = 0; u < g.vertex_count(); ++u) {
        const VertexId cu = m.map[u];
        for (VertexId v : g.neighbors(u)) {
            if (u >= v) continue;
            const VertexId cv = m.map[v];
            if (cu != cv) coarse_edges.emplace_back(cu, cv);
        }
    }
    return Graph::from_edges(m.coarse_count, std::move(coarse_edges));
}

Graph contract_parallel(const Graph& g, const CoarseningMap& m, int threads) {
    check_map(g, m);
    const VertexId nc = m.coarse_count;

    // Bucket fine vertices by super-vertex.
    std::vector<EdgeId> bucket_offsets(static_cast<std::size_t>(nc) + 1, 0);
    for (VertexId c : m.map) ++bucket_offsets[c + 1];
    for (std::size_t i = 1; i < bucket_offsets.size(); ++i) bucket_offsets[i] += bucket_offsets[i - 1];
    std::vector<VertexId> members(g.vertex_count());
    {
        std::vector<EdgeId> cursor(bucket_offsets.begin(), bucket_offsets.end() - 1);
        for (VertexId v = 0; v < g.vertex_count(); ++v) members[cursor[m.map[v]]++] = v;
    }

    auto gather = [&](VertexId c, std::vector<VertexId>& scratch) {
        scratch.clear();
        for (EdgeId i = bucket_offsets[c]; i < bucket_offsets[c + 1]; ++i)
            for (VertexId w : g.neighbors(members[i])) {
                const VertexId cw = m.map[w];
                if (cw != c) scratch.push_back(cw);
            }
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    };

    std::vector<EdgeId> offsets(static_cast<std::size_t>(nc) + 1, 0);
#pragma omp parallel num_threads(threads)
    {
        std::vector<VertexId> scratch;
#pragma omp for schedule(dynamic, 512)
        for (std::int64_t c = 0; c < static_cast<std::int64_t>(nc); ++c) {
            gather(static_cast<VertexId>(c), scratch);
            offsets[static_cast<std::size_t>(c) + 1] = scratch.size();
        }
    }
    for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];

    std::vector<VertexId> neighbors(offsets.back());
#pragma omp parallel num_threads(threads)
    {
        std::vector<VertexId> scratch;
#pragma omp for schedule(dynamic, 512)
        for (std::int64_t c = 0; c < static_cast<std::int64_t>(nc); ++c) {
            gather(static_cast<VertexId>(c), scratch);
            std::copy(scratch.begin(), scratch.end(),
                      neighbors.begin() + static_cast<std::ptrdiff_t>(offsets[static_cast<std::size_t>(c)]));
        }
    }
    return Graph::from_csr(std::move(offsets), std::move(neighbors));
}

Graph contract(const Graph& g, const CoarseningMap& m, int threads) {
    return threads > 1 ? contract_parallel(g, m, threads) : contract_serial(g, m);
}

Hierarchy build_hierarchy(const Graph& g, const CoarsenConfig& cfg) {
    if (cfg.max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
    if (!(cfg.stop_threshold > 0.0 && cfg.stop_threshold <= 1.0))
        throw std::invalid_argument("stop_threshold must be in (0, 1]");

    Rng rng = make_rng(cfg.seed, "coarsen");
    Hierarchy h;
    h.graphs.push_back(g);
    h.per_level_stats.push_back({g.vertex_count(), g.edge_count(), 0.0});

    while (h.depth() < cfg.max_depth) {
        const Graph& cur = h.graphs.back();
        const auto t0 = std::chrono::steady_clock::now();
        CoarseningMap m;
        switch (cfg.strategy) {
            case Strategy::Anti: m = coarsen_anti(cur, rng); break;
            case Strategy::Random: m = coarsen_random(cur, rng); break;
            case Strategy::Novel: m = coarsen_novel(cur, cfg); break;
            case Strategy::Louvain: m = coarsen_louvain(cur, rng); break;
        }
        if (m.coarse_count <= cfg.min_vertices) break; // next level would be too small
        if (static_cast<double>(m.coarse_count) >
            cfg.stop_threshold * static_cast<double>(cur.vertex_count()))
            break; // insufficient shrink
        Graph next = contract(cur, m, cfg.threads);
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        h.per_level_stats.push_back({next.vertex_count(), next.edge_count(), ms});
        h.maps.push_back(std::move(m));
        h.graphs.push_back(std::move(next));
    }
    return h;
}

std::string stats_json(const Hierarchy& h) {
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < h.per_level_stats.size(); ++i) {
        const auto& s = h.per_level_stats[i];
        if (i) out << ",";
        out << "{\"level\":" << i << ",\"vertices\":" << s.vertices << ",\"edges\":" << s.edges
            << ",\"coarsen_ms\":" << s.coarsen_ms << "}";
    }
    out << "]";
    return out.str();
}

namespace {

constexpr char kMapMagic[4] = {'M', 'L', 'C', 'M'};

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw ParseError("truncated coarsening map");
    return v;
}

} // namespace

void write_coarsening_map(const CoarseningMap& m, std::uint32_t level, std::ostream& out) {
    out.write(kMapMagic, 4);
    put<std::uint32_t>(out, level);
    put<std::uint64_t>(out, m.map.size());
    put<std::uint64_t>(out, m.coarse_count);
    // coarse_count <= 2^32 at 32-bit vertex ids, so entries are u32.
    out.write(reinterpret_cast<const char*>(m.map.data()),
              static_cast<std::streamsize>(m.map.size() * sizeof(VertexId)));
}

void write_coarsening_map_file(const CoarseningMap& m, std::uint32_t level, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    write_coarsening_map(m, level, out);
}

std::pair<CoarseningMap, std::uint32_t> read_coarsening_map(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMapMagic, 4) != 0) throw ParseError("bad coarsening map magic");
    const std::uint32_t level = get<std::uint32_t>(in);
    const std::uint64_t n = get<std::uint64_t>(in);
    const std::uint64_t coarse = get<std::uint64_t>(in);
    if (coarse > 0xFFFFFFFFull) throw ParseError("coarsening map too large for 32-bit ids");
    CoarseningMap m;
    m.coarse_count = static_cast<VertexId>(coarse);
    m.map.resize(n);
    in.read(reinterpret_cast<char*>(m.map.data()),
            static_cast<std::streamsize>(n * sizeof(VertexId)));
    if (!in) throw ParseError("truncated coarsening map");
    return {std::move(m), level};
}

std::pair<CoarseningMap, std::uint32_t> read_coarsening_map_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    return read_coarsening_map(in);
}

} // namespace mlge
