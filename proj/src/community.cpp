#include "mlge/community.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mlge {

WeightedGraph WeightedGraph::unit(Graph g) {
    WeightedGraph wg;
    wg.edge_weights.assign(g.adjacency().size(), 1.0);
    wg.self_weights.assign(g.vertex_count(), 0.0);
    wg.total_weight = static_cast<double>(g.edge_count());
    wg.base = std::move(g);
    return wg;
}

double WeightedGraph::weighted_degree(VertexId v) const {
    double k = 2.0 * self_weights[v];
    for (EdgeId e = base.offsets()[v]; e < base.offsets()[v + 1]; ++e) k += edge_weights[e];
    return k;
}

Partition Partition::singletons(VertexId n) {
    Partition p;
    p.community.resize(n);
    std::iota(p.community.begin(), p.community.end(), VertexId{0});
    p.community_count = n;
    return p;
}

void Partition::compact() {
    std::vector<VertexId> relabel(community_count, static_cast<VertexId>(-1));
    VertexId next = 0;
    for (auto& c : community) {
        if (relabel[c] == static_cast<VertexId>(-1)) relabel[c] = next++;
        c = relabel[c];
    }
    community_count = next;
}

double modularity(const WeightedGraph& wg, const Partition& p) {
    const VertexId n = wg.base.vertex_count();
    if (p.community.size() != n) throw std::invalid_argument("partition does not cover graph");
    if (wg.total_weight <= 0.0) throw std::domain_error("modularity of weightless graph");

    const double two_m = 2.0 * wg.total_weight;
    double intra = 0.0; // sum over vertices of edge weight into own community
    std::vector<double> community_degree(p.community_count, 0.0);
    for (VertexId v = 0; v < n; ++v) {
        const VertexId cv = p.community[v];
        community_degree[cv] += wg.weighted_degree(v);
        double e_in = 2.0 * wg.self_weights[v];
        for (EdgeId e = wg.base.offsets()[v]; e < wg.base.offsets()[v + 1]; ++e)
            if (p.community[wg.base.adjacency()[e]] == cv) e_in += wg.edge_weights[e];
        intra += e_in;
    }
    double q = intra / two_m;
    for (double a : community_degree) q -= (a / two_m) * (a / two_m);
    return q;
}

std::size_t louvain_local_move(const WeightedGraph& wg, Partition& p, Rng& rng,
                               std::vector<MoveRecord>* trace) {
    const VertexId n = wg.base.vertex_count();
    if (p.community.size() != n) throw std::invalid_argument("partition does not cover graph");
    if (wg.total_weight <= 0.0) return 0; // nothing to optimize

    const double m = wg.total_weight;
    std::vector<double> degree(n);
    std::vector<double> community_total(p.community_count, 0.0);
    for (VertexId v = 0; v < n; ++v) {
        degree[v] = wg.weighted_degree(v);
        community_total[p.community[v]] += degree[v];
    }

    std::vector<VertexId> order(n);
    std::iota(order.begin(), order.end(), VertexId{0});
    std::shuffle(order.begin(), order.end(), rng);

    // Scatter buffer: weight from the current vertex into each community.
    std::vector<double> weight_to(p.community_count, 0.0);
    std::vector<VertexId> touched;

    std::size_t moved = 0;
    for (VertexId v : order) {
        const VertexId own = p.community[v];
        touched.clear();
        for (EdgeId e = wg.base.offsets()[v]; e < wg.base.offsets()[v + 1]; ++e) {
            const VertexId c = p.community[wg.base.adjacency()[e]];
            if (weight_to[c] == 0.0) touched.push_back(c);
            weight_to[c] += wg.edge_weights[e];
        }

        community_total[own] -= degree[v];
        // Gain of joining community C, up to terms common to all choices:
        // w(v->C)/m - k_v * tot_C / (2 m^2). Staying counts as joining `own`
        // after removal.
        auto gain = [&](VertexId c) {
            return weight_to[c] / m - degree[v] * community_total[c] / (2.0 * m * m);
        };
        const double stay_gain = gain(own);
        VertexId best = own;
        double best_gain = stay_gain;
        for (VertexId c : touched) {
            if (c == own) continue;
            const double g = gain(c);
            if (g > best_gain || (g == best_gain && best != own && c < best)) {
                best = c;
                best_gain = g;
            }
        }
        community_total[best] += degree[v];
        if (best != own) {
            p.community[v] = best;
            ++moved;
            if (trace) trace->push_back({v, own, best, best_gain - stay_gain});
        }
        for (VertexId c : touched) weight_to[c] = 0.0;
    }
    return moved;
}

Partition louvain(const WeightedGraph& wg, int max_passes, Rng& rng) {
    if (max_passes < 1) throw std::invalid_argument("max_passes must be >= 1");
    Partition p = Partition::singletons(wg.base.vertex_count());
    for (int pass = 0; pass < max_passes; ++pass)
        if (louvain_local_move(wg, p, rng) == 0) break;
    p.compact();
    return p;
}

std::string partition_json(const Partition& p) {
    std::string out = "[";
    for (std::size_t v = 0; v < p.community.size(); ++v) {
        if (v) out += ",";
        out += std::to_string(p.community[v]);
    }
    out += "]";
    return out;
}

} // namespace mlge
