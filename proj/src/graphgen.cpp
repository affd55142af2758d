#include "mlge/graphgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mlge/rng.hpp"

namespace mlge {

namespace {

// Index of the slot whose cumulative weight bracket contains `target`,
// searched within [lo, hi) of the prefix array.
std::size_t locate(const std::vector<double>& prefix, std::size_t lo, std::size_t hi, double target) {
    const auto it = std::upper_bound(prefix.begin() + static_cast<std::ptrdiff_t>(lo),
                                     prefix.begin() + static_cast<std::ptrdiff_t>(hi), target);
    return static_cast<std::size_t>(it - prefix.begin() - 1);
}

} // namespace

Graph generate_community_graph(const GenConfig& cfg) {
    const std::size_t n = cfg.vertices;
    if (n < 2) throw std::invalid_argument("generator needs at least two vertices");
    const std::size_t communities = std::max<std::size_t>(1, std::min<std::size_t>(cfg.community_count, n));
    Rng rng = make_rng(cfg.seed, "graphgen");

    // Skewed community sizes (larger communities first).
    std::vector<std::size_t> boundary(communities + 1, 0);
    {
        std::vector<double> share(communities);
        double total = 0;
        for (std::size_t k = 0; k < communities; ++k) {
            share[k] = std::pow(static_cast<double>(k + 1), -cfg.community_size_exponent);
            total += share[k];
        }
        double acc = 0;
        for (std::size_t k = 0; k < communities; ++k) {
            acc += share[k] / total;
            boundary[k + 1] = std::min(n, static_cast<std::size_t>(std::llround(acc * static_cast<double>(n))));
        }
        boundary[communities] = n;
    }
    std::vector<std::uint32_t> community_of(n);
    for (std::size_t k = 0; k < communities; ++k)
        for (std::size_t s = boundary[k]; s < boundary[k + 1]; ++s)
            community_of[s] = static_cast<std::uint32_t>(k);

    // Truncated Pareto expected degrees.
    const double alpha = 1.0 / (cfg.degree_exponent - 1.0);
    const double cap = std::max(2.0, cfg.max_degree_fraction * static_cast<double>(n));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        const double u = unit(rng);
        const double w = std::min(cap, std::pow(1.0 - u, -alpha));
        prefix[s + 1] = prefix[s] + w;
    }

    auto draw_slot = [&](std::size_t lo, std::size_t hi) {
        const double target = prefix[lo] + unit(rng) * (prefix[hi] - prefix[lo]);
        return locate(prefix, lo, hi + 1, target);
    };

    const auto raw_target = static_cast<std::size_t>(
        std::llround(1.25 * static_cast<double>(cfg.target_edges)));
    std::vector<std::pair<VertexId, VertexId>> pairs;
    pairs.reserve(raw_target);
    for (std::size_t i = 0; i < raw_target; ++i) {
        const std::size_t u = draw_slot(0, n - 1);
        std::size_t v;
        if (unit(rng) < cfg.mixing) {
            v = draw_slot(0, n - 1);
        } else {
            const std::uint32_t c = community_of[u];
            v = draw_slot(boundary[c], boundary[c + 1] - 1);
        }
        if (u == v) continue;
        pairs.emplace_back(static_cast<VertexId>(u), static_cast<VertexId>(v));
    }

    // Shuffle labels so vertex ids say nothing about degree or community.
    std::vector<VertexId> label(n);
    std::iota(label.begin(), label.end(), VertexId{0});
    std::shuffle(label.begin(), label.end(), rng);
    for (auto& [u, v] : pairs) {
        u = label[u];
        v = label[v];
    }
    Graph g = Graph::from_edges(cfg.vertices, std::move(pairs));
    if (cfg.largest_component) g = largest_component(g);
    return g;
}

Graph largest_component(const Graph& g) {
    const VertexId n = g.vertex_count();
    std::vector<VertexId> component(n, static_cast<VertexId>(-1));
    std::vector<VertexId> queue;
    VertexId next_component = 0, best = 0;
    std::size_t best_size = 0;
    for (VertexId start = 0; start < n; ++start) {
        if (component[start] != static_cast<VertexId>(-1)) continue;
        const VertexId c = next_component++;
        std::size_t size = 0;
        queue.assign(1, start);
        component[start] = c;
        while (!queue.empty()) {
            const VertexId v = queue.back();
            queue.pop_back();
            ++size;
            for (VertexId u : g.neighbors(v))
                if (component[u] == static_cast<VertexId>(-1)) {
                    component[u] = c;
                    queue.push_back(u);
                }
        }
        if (size > best_size) {
            best_size = size;
            best = c;
        }
    }
    std::vector<VertexId> dense(n, static_cast<VertexId>(-1));
    VertexId kept = 0;
    for (VertexId v = 0; v < n; ++v)
        if (component[v] == best) dense[v] = kept++;
    std::vector<std::pair<VertexId, VertexId>> pairs;
    pairs.reserve(g.edge_count());
    for (auto [u, v] : g.edges())
        if (component[u] == best && component[v] == best)
            pairs.emplace_back(dense[u], dense[v]);
    return Graph::from_edges(kept, std::move(pairs));
}

} // namespace mlge
