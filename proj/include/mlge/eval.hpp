#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlge/embed.hpp"
#include "mlge/graph.hpp"
#include "mlge/rng.hpp"

namespace mlge {

struct PairExample {
    VertexId u = 0;
    VertexId v = 0;
    std::int32_t label = 0;
};

// Link-prediction dataset: a train graph with compacted ids, surviving test
// positives, and balanced labeled pair sets once negatives are sampled.
struct EvalDataset {
    Graph train_graph;
    std::vector<VertexId> kept_ids; // compacted id -> pre-split dense id
    std::vector<std::pair<VertexId, VertexId>> test_pos;
    std::vector<PairExample> train_pairs;
    std::vector<PairExample> test_pairs;
};

struct EvalConfig {
    // Negative rejection sets: the literal rule rejects only train edges for
    // training negatives; test negatives reject any edge of the full graph.
    bool train_negatives_reject_full = false;
    bool test_negatives_reject_full = true;
    std::uint32_t logreg_epochs = 5;
    double logreg_lr = 0.01;
    double logreg_l2 = 1e-4;
    int threads = 1;
};

// Uniformly samples ceil(train_fraction*|E|) edges as the train set, drops
// vertices isolated in it (compacting ids), and keeps the remaining edges
// whose endpoints survived as test positives. Pair lists stay empty.
EvalDataset split(const Graph& g, double train_fraction, Rng& rng);

// `count` distinct non-adjacent pairs drawn from `pool` (ids in `avoid`'s
// space). Throws std::runtime_error once rejections exceed 100x count.
std::vector<std::pair<VertexId, VertexId>> sample_negatives(const Graph& avoid,
                                                            std::uint64_t count,
                                                            std::span<const VertexId> pool,
                                                            Rng& rng);

// Samples balanced negatives for both pair sets. `full` is the pre-split
// graph used for full-graph rejection.
void fill_pairs(EvalDataset& ds, const Graph& full, const EvalConfig& cfg, Rng& rng);

std::vector<float> hadamard_features(const EmbeddingMatrix& m, VertexId u, VertexId v);

// Row-major |pairs| x dim feature matrix of Hadamard products.
std::vector<float> build_features(const EmbeddingMatrix& m, std::span<const PairExample> pairs,
                                  int threads);

struct LinearModel {
    std::vector<double> weights;
    double bias = 0;

    double score(const float* x) const;
};

// SGD on log loss with L2 penalty, shuffled per epoch. Throws on
// single-class input.
LinearModel train_logreg(const std::vector<float>& features, std::uint32_t dim,
                         std::span<const std::int32_t> labels, std::uint32_t epochs, double lr,
                         double l2, Rng& rng);

// Same optimization with Hadamard features computed on the fly, so pair
// sets of any size fit in memory. Identical update sequence to
// train_logreg on the materialized matrix.
LinearModel train_logreg_streaming(const EmbeddingMatrix& m, std::span<const PairExample> pairs,
                                   std::uint32_t epochs, double lr, double l2, Rng& rng);

// Mann-Whitney AUC via rank sums; ties credited half. Throws when only one
// class is present.
double auc_roc(std::span<const double> scores, std::span<const std::int32_t> labels);

struct EvalReport {
    double auc = 0;
    double fit_seconds = 0;
    double score_seconds = 0;
};

EvalReport evaluate(const EmbeddingMatrix& m, const EvalDataset& ds, const EvalConfig& cfg,
                    Rng& rng);

} // namespace mlge
