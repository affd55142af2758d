#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mlge/coarsen.hpp"
#include "mlge/graph.hpp"
#include "mlge/rng.hpp"

namespace mlge {

struct EmbeddingMatrix {
    std::uint64_t rows = 0;
    std::uint32_t dim = 0;
    std::vector<float> data; // row-major, rows * dim

    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::uint64_t r, std::uint32_t d) : rows(r), dim(d), data(r * d, 0.0f) {}

    float* row(std::uint64_t i) { return data.data() + i * dim; }
    const float* row(std::uint64_t i) const { return data.data() + i * dim; }

    bool all_finite() const;
};

struct EpochSchedule {
    std::vector<std::uint64_t> per_level; // per_level[i] belongs to G_i
    std::uint64_t total = 0;
};

struct TrainConfig {
    std::uint32_t dim = 128;
    std::uint64_t epochs = 1000;
    double smoothing = 0.3; // p: fraction of epochs spread uniformly
    double learning_rate = 0.035;
    std::uint32_t negative_samples = 3;
    double lr_floor_fraction = 0.1; // linear decay target within a level
    std::uint64_t seed = 0;
    int threads = 1;
};

class TrainError : public std::runtime_error {
public:
    TrainError(const std::string& what, int level, std::uint64_t epoch)
        : std::runtime_error(what + " (level " + std::to_string(level) + ", epoch " +
                             std::to_string(epoch) + ")"),
          level_(level), epoch_(epoch) {}
    int level() const { return level_; }
    std::uint64_t epoch() const { return epoch_; }

private:
    int level_;
    std::uint64_t epoch_;
};

// Splits an epoch budget: fraction p uniformly, the rest geometrically so
// each level gets half the epochs of the next-coarser one. Sums to e
// exactly; every level gets at least one epoch. Throws when e < levels.
EpochSchedule distribute_epochs(std::uint64_t e, double p, std::size_t levels);

// `epochs` passes over a seeded permutation of the edges; one positive pair
// update and `negative_samples` source-side negative updates per edge. The
// learning rate decays linearly from lr_start to lr_start*lr_floor_fraction
// across the level's updates. threads > 1 trains lock-free (benign races);
// threads == 1 is bit-deterministic. `level` only labels errors.
void train_level(const Graph& g, EmbeddingMatrix& m, std::uint64_t epochs, double lr_start,
                 const TrainConfig& cfg, Rng& rng, int level = 0);

// Fine-level matrix with fine_row[v] = coarse_row[map[v]].
EmbeddingMatrix expand(const EmbeddingMatrix& coarse, const CoarseningMap& m);

// Train coarsest-to-finest with the hybrid epoch schedule; returns M_0.
EmbeddingMatrix embed_hierarchy(const Hierarchy& h, const TrainConfig& cfg);

// "MLEM" binary format and the plain-text variant.
void write_embedding(const EmbeddingMatrix& m, std::ostream& out);
void write_embedding_file(const EmbeddingMatrix& m, const std::string& path);
EmbeddingMatrix read_embedding(std::istream& in);
EmbeddingMatrix read_embedding_file(const std::string& path);
void write_embedding_text(const EmbeddingMatrix& m, std::ostream& out);

} // namespace mlge
