#include "mlge/graph.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace mlge {

Graph Graph::from_edges(VertexId vertex_count,
                        std::vector<std::pair<VertexId, VertexId>> edges) {
    for (auto& [u, v] : edges) {
        if (u >= vertex_count || v >= vertex_count)
            throw std::invalid_argument("edge endpoint out of range");
        if (u > v) std::swap(u, v);
    }
    std::erase_if(edges, [](const auto& e) { return e.first == e.second; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<EdgeId> offsets(static_cast<std::size_t>(vertex_count) + 1, 0);
    for (const auto& [u, v] : edges) {
        ++offsets[u + 1];
        ++offsets[v + 1];
    }
    for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];

    std::vector<VertexId> neighbors(2 * edges.size());
    std::vector<EdgeId> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& [u, v] : edges) {
        neighbors[cursor[u]++] = v;
        neighbors[cursor[v]++] = u;
    }
    // Edges are sorted by (u, v), so each slice's entries for partners > u
    // arrive in order; partners < u also arrive in order. The two runs are
    // interleaved though, so sort each slice once.
    Graph g;
    g.offsets_ = std::move(offsets);
    g.neighbors_ = std::move(neighbors);
    for (VertexId v = 0; v < vertex_count; ++v)
        std::sort(g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]),
                  g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]));
    return g;
}

Graph Graph::from_csr(std::vector<EdgeId> offsets, std::vector<VertexId> neighbors) {
    if (offsets.empty() || offsets.front() != 0 || offsets.back() != neighbors.size())
        throw std::invalid_argument("malformed CSR offsets");
    Graph g;
    g.offsets_ = std::move(offsets);
    g.neighbors_ = std::move(neighbors);
    return g;
}

bool Graph::has_edge(VertexId u, VertexId v) const {
    auto nbrs = neighbors(u);
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<std::pair<VertexId, VertexId>> Graph::edges() const {
    std::vector<std::pair<VertexId, VertexId>> out;
    out.reserve(edge_count());
    for (VertexId u = 0; u < vertex_count(); ++u)
        for (VertexId v : neighbors(u))
            if (u < v) out.emplace_back(u, v);
    return out;
}

void Graph::validate() const {
    const VertexId n = vertex_count();
    if (offsets_.front() != 0 || offsets_.back() != neighbors_.size())
        throw std::logic_error("offset bounds broken");
    for (VertexId v = 0; v < n; ++v) {
        if (offsets_[v] > offsets_[v + 1]) throw std::logic_error("offsets not monotone");
        auto nbrs = neighbors(v);
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            if (nbrs[i] >= n) throw std::logic_error("neighbor id out of range");
            if (nbrs[i] == v) throw std::logic_error("self-loop present");
            if (i > 0 && nbrs[i - 1] >= nbrs[i]) throw std::logic_error("slice not strictly sorted");
            if (!has_edge(nbrs[i], v)) throw std::logic_error("adjacency not symmetric");
        }
    }
}

namespace {

bool parse_u64(const char*& p, const char* end, std::uint64_t& out) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p == end || *p < '0' || *p > '9') return false;
    std::uint64_t x = 0;
    while (p < end && *p >= '0' && *p <= '9') {
        x = x * 10 + static_cast<std::uint64_t>(*p - '0');
        ++p;
    }
    out = x;
    return true;
}

} // namespace

LoadResult load_edge_list(std::istream& in, std::string_view comment_prefixes) {
    std::vector<std::pair<VertexId, VertexId>> edges;
    std::vector<std::uint64_t> original_ids;
    std::unordered_map<std::uint64_t, VertexId> dense;

    auto intern = [&](std::uint64_t id) -> VertexId {
        auto [it, fresh] = dense.try_emplace(id, static_cast<VertexId>(original_ids.size()));
        if (fresh) {
            if (original_ids.size() > 0xFFFFFFFFull)
                throw ParseError("more than 2^32 distinct vertices");
            original_ids.push_back(id);
        }
        return it->second;
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
        if (p == end) continue;
        if (comment_prefixes.find(*p) != std::string_view::npos) continue;

        std::uint64_t a = 0, b = 0;
        if (!parse_u64(p, end, a) || !parse_u64(p, end, b))
            throw ParseError("expected two non-negative integers", lineno);
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
        if (p != end) throw ParseError("trailing garbage after edge", lineno);

        VertexId u = intern(a);
        VertexId v = intern(b);
        edges.emplace_back(u, v);
    }
    if (edges.empty()) throw ParseError("input contains no edges");

    LoadResult res;
    res.graph = Graph::from_edges(static_cast<VertexId>(original_ids.size()), std::move(edges));
    res.original_ids = std::move(original_ids);
    return res;
}

LoadResult load_edge_list_file(const std::string& path, std::string_view comment_prefixes) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return load_edge_list(in, comment_prefixes);
}

void write_edge_list(const Graph& g, std::ostream& out) {
    const VertexId n = g.vertex_count();
    std::vector<bool> seen(n, false);
    std::vector<std::pair<VertexId, VertexId>> intro;
    intro.reserve(n);

    // Introduction pass: emit one edge per still-unseen vertex so that
    // first appearances run 0, 1, 2, ... whenever the graph's labeling is
    // already in first-appearance order.
    for (VertexId k = 0; k < n; ++k) {
        if (seen[k]) continue;
        auto nbrs = g.neighbors(k);
        if (nbrs.empty()) continue; // unrecoverable from an edge list
        if (nbrs.front() < k) {
            intro.emplace_back(nbrs.front(), k);
            seen[k] = true;
        } else {
            intro.emplace_back(k, nbrs.front());
            seen[k] = true;
            seen[nbrs.front()] = true;
        }
    }
    std::unordered_set<std::uint64_t> emitted;
    emitted.reserve(intro.size() * 2);
    for (const auto& [u, v] : intro) {
        out << u << ' ' << v << '\n';
        emitted.insert((static_cast<std::uint64_t>(std::min(u, v)) << 32) | std::max(u, v));
    }
    for (VertexId u = 0; u < n; ++u)
        for (VertexId v : g.neighbors(u))
            if (u < v && !emitted.count((static_cast<std::uint64_t>(u) << 32) | v))
                out << u << ' ' << v << '\n';
}

double shrink_rate(const Graph& prev, const Graph& next) {
    if (prev.vertex_count() == 0) throw std::domain_error("shrink_rate of empty graph");
    return (static_cast<double>(prev.vertex_count()) - static_cast<double>(next.vertex_count())) /
           static_cast<double>(prev.vertex_count());
}

double density(const Graph& g) {
    if (g.vertex_count() == 0) throw std::domain_error("density of empty graph");
    return static_cast<double>(g.edge_count()) / static_cast<double>(g.vertex_count());
}

namespace {

constexpr char kGraphMagic[4] = {'M', 'L', 'G', 'E'};
constexpr std::uint32_t kGraphVersion = 1;
constexpr std::uint32_t kFlagWideNeighbors = 1u;

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw ParseError("truncated binary stream");
    return v;
}

} // namespace

void write_graph_cache(const Graph& g, std::ostream& out) {
    out.write(kGraphMagic, 4);
    put<std::uint32_t>(out, kGraphVersion);
    put<std::uint32_t>(out, 0); // 32-bit vertex ids never need wide neighbors
    put<std::uint64_t>(out, g.vertex_count());
    put<std::uint64_t>(out, g.edge_count());
    out.write(reinterpret_cast<const char*>(g.offsets().data()),
              static_cast<std::streamsize>(g.offsets().size() * sizeof(EdgeId)));
    out.write(reinterpret_cast<const char*>(g.adjacency().data()),
              static_cast<std::streamsize>(g.adjacency().size() * sizeof(VertexId)));
}

void write_graph_cache_file(const Graph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    write_graph_cache(g, out);
}

Graph read_graph_cache(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kGraphMagic, 4) != 0) throw ParseError("bad graph magic");
    if (get<std::uint32_t>(in) != kGraphVersion) throw ParseError("unsupported graph version");
    const std::uint32_t flags = get<std::uint32_t>(in);
    const std::uint64_t n = get<std::uint64_t>(in);
    const std::uint64_t m = get<std::uint64_t>(in);
    if (n > 0xFFFFFFFFull) throw ParseError("graph too large for 32-bit vertex ids");

    std::vector<EdgeId> offsets(n + 1);
    in.read(reinterpret_cast<char*>(offsets.data()),
            static_cast<std::streamsize>(offsets.size() * sizeof(EdgeId)));
    std::vector<VertexId> neighbors(2 * m);
    if (flags & kFlagWideNeighbors) {
        std::vector<std::uint64_t> wide(2 * m);
        in.read(reinterpret_cast<char*>(wide.data()),
                static_cast<std::streamsize>(wide.size() * sizeof(std::uint64_t)));
        for (std::size_t i = 0; i < wide.size(); ++i)
            neighbors[i] = static_cast<VertexId>(wide[i]);
    } else {
        in.read(reinterpret_cast<char*>(neighbors.data()),
                static_cast<std::streamsize>(neighbors.size() * sizeof(VertexId)));
    }
    if (!in) throw ParseError("truncated graph cache");
    return Graph::from_csr(std::move(offsets), std::move(neighbors));
}

Graph read_graph_cache_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    return read_graph_cache(in);
}

} // namespace mlge
