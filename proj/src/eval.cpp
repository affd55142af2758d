#include "mlge/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <omp.h>
#include <stdexcept>
#include <unordered_set>

namespace mlge {

EvalDataset split(const Graph& g, double train_fraction, Rng& rng) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train fraction must be in (0, 1)");
    auto edges = g.edges();
    if (edges.empty()) throw std::invalid_argument("cannot split an edgeless graph");
    std::shuffle(edges.begin(), edges.end(), rng);
    const auto train_count = static_cast<std::size_t>(
        std::ceil(train_fraction * static_cast<double>(edges.size())));

    std::vector<VertexId> compact(g.vertex_count(), static_cast<VertexId>(-1));
    std::vector<VertexId> kept;
    std::vector<std::uint32_t> degree(g.vertex_count(), 0);
    for (std::size_t i = 0; i < train_count; ++i) {
        ++degree[edges[i].first];
        ++degree[edges[i].second];
    }
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (degree[v] > 0) {
            compact[v] = static_cast<VertexId>(kept.size());
            kept.push_back(v);
        }
    if (kept.empty()) throw std::runtime_error("train split is empty");

    std::vector<std::pair<VertexId, VertexId>> train_edges;
    train_edges.reserve(train_count);
    for (std::size_t i = 0; i < train_count; ++i)
        train_edges.emplace_back(compact[edges[i].first], compact[edges[i].second]);

    EvalDataset ds;
    ds.train_graph = Graph::from_edges(static_cast<VertexId>(kept.size()), std::move(train_edges));
    ds.kept_ids = std::move(kept);
    for (std::size_t i = train_count; i < edges.size(); ++i) {
        const VertexId cu = compact[edges[i].first];
        const VertexId cv = compact[edges[i].second];
        if (cu == static_cast<VertexId>(-1) || cv == static_cast<VertexId>(-1)) continue;
        ds.test_pos.emplace_back(cu, cv);
    }
    return ds;
}

std::vector<std::pair<VertexId, VertexId>> sample_negatives(const Graph& avoid,
                                                            std::uint64_t count,
                                                            std::span<const VertexId> pool,
                                                            Rng& rng) {
    if (pool.size() < 2) throw std::invalid_argument("negative pool needs at least two vertices");
    std::vector<std::pair<VertexId, VertexId>> out;
    out.reserve(count);
    std::unordered_set<std::uint64_t> taken;
    taken.reserve(count * 2);
    const std::uint64_t max_draws = 100 * count;
    std::uint64_t draws = 0;
    while (out.size() < count) {
        if (draws++ >= max_draws)
            throw std::runtime_error("negative sampling budget exhausted; graph too dense");
        VertexId u = pool[bounded(rng, pool.size())];
        VertexId v = pool[bounded(rng, pool.size())];
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
        if (taken.count(key) || avoid.has_edge(u, v)) continue;
        taken.insert(key);
        out.emplace_back(u, v);
    }
    return out;
}

namespace {

// Remaps full-graph-space negative pairs back to compacted train ids.
std::vector<std::pair<VertexId, VertexId>> to_compact(
    const std::vector<std::pair<VertexId, VertexId>>& pairs, const Graph& full,
    const std::vector<VertexId>& kept_ids) {
    std::vector<VertexId> compact(full.vertex_count(), static_cast<VertexId>(-1));
    for (std::size_t i = 0; i < kept_ids.size(); ++i)
        compact[kept_ids[i]] = static_cast<VertexId>(i);
    std::vector<std::pair<VertexId, VertexId>> out;
    out.reserve(pairs.size());
    for (auto [u, v] : pairs) out.emplace_back(compact[u], compact[v]);
    return out;
}

void append_labeled(std::vector<PairExample>& dst,
                    const std::vector<std::pair<VertexId, VertexId>>& pairs, std::int32_t label) {
    for (auto [u, v] : pairs) dst.push_back({u, v, label});
}

} // namespace

void fill_pairs(EvalDataset& ds, const Graph& full, const EvalConfig& cfg, Rng& rng) {
    const VertexId n_train = ds.train_graph.vertex_count();
    std::vector<VertexId> train_pool(n_train);
    std::iota(train_pool.begin(), train_pool.end(), VertexId{0});

    ds.train_pairs.clear();
    append_labeled(ds.train_pairs, ds.train_graph.edges(), 1);
    const std::uint64_t train_negs = ds.train_graph.edge_count();
    if (cfg.train_negatives_reject_full) {
        auto negs = sample_negatives(full, train_negs, ds.kept_ids, rng);
        append_labeled(ds.train_pairs, to_compact(negs, full, ds.kept_ids), 0);
    } else {
        append_labeled(ds.train_pairs, sample_negatives(ds.train_graph, train_negs, train_pool, rng), 0);
    }

    ds.test_pairs.clear();
    append_labeled(ds.test_pairs, ds.test_pos, 1);
    const std::uint64_t test_negs = ds.test_pos.size();
    if (test_negs > 0) {
        if (cfg.test_negatives_reject_full) {
            auto negs = sample_negatives(full, test_negs, ds.kept_ids, rng);
            append_labeled(ds.test_pairs, to_compact(negs, full, ds.kept_ids), 0);
        } else {
            append_labeled(ds.test_pairs, sample_negatives(ds.train_graph, test_negs, train_pool, rng), 0);
        }
    }
}

std::vector<float> hadamard_features(const EmbeddingMatrix& m, VertexId u, VertexId v) {
    if (u >= m.rows || v >= m.rows) throw std::out_of_range("vertex id outside embedding");
    std::vector<float> f(m.dim);
    const float* a = m.row(u);
    const float* b = m.row(v);
    for (std::uint32_t k = 0; k < m.dim; ++k) f[k] = a[k] * b[k];
    return f;
}

std::vector<float> build_features(const EmbeddingMatrix& m, std::span<const PairExample> pairs,
                                  int threads) {
    std::vector<float> features(pairs.size() * m.dim);
#pragma omp parallel for schedule(static) num_threads(std::max(threads, 1))
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(pairs.size()); ++i) {
        const auto& p = pairs[static_cast<std::size_t>(i)];
        if (p.u >= m.rows || p.v >= m.rows) continue; // validated by caller
        const float* a = m.row(p.u);
        const float* b = m.row(p.v);
        float* f = features.data() + static_cast<std::size_t>(i) * m.dim;
        for (std::uint32_t k = 0; k < m.dim; ++k) f[k] = a[k] * b[k];
    }
    return features;
}

double LinearModel::score(const float* x) const {
    double z = bias;
    for (std::size_t k = 0; k < weights.size(); ++k) z += weights[k] * x[k];
    return z;
}

namespace {

// Shared SGD body; `feature` materializes row i into `buf` and returns it.
template <class FeatureFn>
LinearModel logreg_sgd(std::size_t n, std::uint32_t dim, FeatureFn&& feature,
                       std::span<const std::int32_t> labels, std::uint32_t epochs, double lr,
                       double l2, Rng& rng) {
    if (n < 2) throw std::invalid_argument("need at least two training rows");
    const auto positives = static_cast<std::size_t>(
        std::count(labels.begin(), labels.end(), std::int32_t{1}));
    if (positives == 0 || positives == n)
        throw std::invalid_argument("logistic regression needs both classes");

    LinearModel model;
    model.weights.assign(dim, 0.0);
    std::vector<float> buf(dim);
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    for (std::uint32_t ep = 0; ep < epochs; ++ep) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::uint32_t i : order) {
            const float* x = feature(i, buf.data());
            const double p = 1.0 / (1.0 + std::exp(-model.score(x)));
            const double err = p - static_cast<double>(labels[i]);
            for (std::uint32_t k = 0; k < dim; ++k)
                model.weights[k] -= lr * (err * x[k] + l2 * model.weights[k]);
            model.bias -= lr * err;
        }
    }
    return model;
}

} // namespace

LinearModel train_logreg(const std::vector<float>& features, std::uint32_t dim,
                         std::span<const std::int32_t> labels, std::uint32_t epochs, double lr,
                         double l2, Rng& rng) {
    const std::size_t n = labels.size();
    if (features.size() != n * dim)
        throw std::invalid_argument("feature matrix does not match labels");
    return logreg_sgd(
        n, dim,
        [&](std::uint32_t i, float*) { return features.data() + static_cast<std::size_t>(i) * dim; },
        labels, epochs, lr, l2, rng);
}

LinearModel train_logreg_streaming(const EmbeddingMatrix& m, std::span<const PairExample> pairs,
                                   std::uint32_t epochs, double lr, double l2, Rng& rng) {
    std::vector<std::int32_t> labels(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) labels[i] = pairs[i].label;
    return logreg_sgd(
        pairs.size(), m.dim,
        [&](std::uint32_t i, float* buf) {
            const float* a = m.row(pairs[i].u);
            const float* b = m.row(pairs[i].v);
            for (std::uint32_t k = 0; k < m.dim; ++k) buf[k] = a[k] * b[k];
            return static_cast<const float*>(buf);
        },
        labels, epochs, lr, l2, rng);
}

double auc_roc(std::span<const double> scores, std::span<const std::int32_t> labels) {
    const std::size_t n = scores.size();
    if (n != labels.size() || n == 0) throw std::invalid_argument("scores/labels mismatch");
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(),
              [&](std::uint32_t a, std::uint32_t b) { return scores[a] < scores[b]; });

    double positive_rank_sum = 0;
    std::uint64_t positives = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j); // 1-based ranks i+1..j
        for (std::size_t k = i; k < j; ++k)
            if (labels[idx[k]] == 1) {
                positive_rank_sum += avg_rank;
                ++positives;
            }
        i = j;
    }
    const std::uint64_t negatives = n - positives;
    if (positives == 0 || negatives == 0)
        throw std::invalid_argument("AUC needs both classes");
    return (positive_rank_sum -
            0.5 * static_cast<double>(positives) * static_cast<double>(positives + 1)) /
           (static_cast<double>(positives) * static_cast<double>(negatives));
}

EvalReport evaluate(const EmbeddingMatrix& m, const EvalDataset& ds, const EvalConfig& cfg,
                    Rng& rng) {
    if (m.rows != ds.train_graph.vertex_count())
        throw std::invalid_argument("embedding does not match train graph");
    if (ds.train_pairs.empty() || ds.test_pairs.empty())
        throw std::invalid_argument("dataset pairs not filled");
    for (const auto& p : ds.test_pairs)
        if (p.u >= m.rows || p.v >= m.rows)
            throw std::invalid_argument("pair vertex outside embedding");

    using clock = std::chrono::steady_clock;
    EvalReport report;

    // Features are streamed rather than materialized: the pair sets reach
    // several million rows at youtube scale.
    auto t0 = clock::now();
    const LinearModel model = train_logreg_streaming(m, ds.train_pairs, cfg.logreg_epochs,
                                                     cfg.logreg_lr, cfg.logreg_l2, rng);
    report.fit_seconds = std::chrono::duration<double>(clock::now() - t0).count();

    t0 = clock::now();
    std::vector<double> scores(ds.test_pairs.size());
    std::vector<std::int32_t> test_labels(ds.test_pairs.size());
#pragma omp parallel num_threads(std::max(cfg.threads, 1))
    {
        std::vector<float> buf(m.dim);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(ds.test_pairs.size()); ++i) {
            const auto& p = ds.test_pairs[static_cast<std::size_t>(i)];
            const float* a = m.row(p.u);
            const float* b = m.row(p.v);
            for (std::uint32_t k = 0; k < m.dim; ++k) buf[k] = a[k] * b[k];
            scores[static_cast<std::size_t>(i)] = model.score(buf.data());
            test_labels[static_cast<std::size_t>(i)] = p.label;
        }
    }
    report.auc = auc_roc(scores, test_labels);
    report.score_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    return report;
}

} // namespace mlge
