#include "mlge/embed.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <omp.h>
#include <ostream>

namespace mlge {

bool EmbeddingMatrix::all_finite() const {
    for (float x : data)
        if (!std::isfinite(x)) return false;
    return true;
}

EpochSchedule distribute_epochs(std::uint64_t e, double p, std::size_t levels) {
    if (levels < 1) throw std::invalid_argument("schedule needs at least one level");
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("smoothing must be in [0, 1)");
    if (e < levels) throw std::invalid_argument("epoch budget smaller than level count");

    const double depth = static_cast<double>(levels);
    const double uniform_share = p * static_cast<double>(e) / depth;
    // Closed form of the halving recurrence: the geometric parts sum to
    // (1-p)*e with the coarsest level holding (1-p)*e / (2 - 2^(1-D)).
    const double geo_last = (1.0 - p) * static_cast<double>(e) / (2.0 - std::pow(2.0, 1.0 - depth));

    std::vector<std::int64_t> per(levels);
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < levels; ++i) {
        const double geo_i = geo_last * std::pow(0.5, static_cast<double>(levels - 1 - i));
        per[i] = std::llround(uniform_share) + std::llround(geo_i);
        sum += per[i];
    }
    per[levels - 1] += static_cast<std::int64_t>(e) - sum; // rounding residue

    // Every level must get at least one epoch; steal from the largest.
    for (std::size_t i = 0; i < levels; ++i) {
        while (per[i] < 1) {
            const auto j = static_cast<std::size_t>(
                std::max_element(per.begin(), per.end()) - per.begin());
            --per[j];
            ++per[i];
        }
    }

    EpochSchedule s;
    s.per_level.assign(per.begin(), per.end());
    s.total = e;
    return s;
}

namespace {

inline float sigmoidf(float x) { return 1.0f / (1.0f + std::exp(-x)); }

inline float dotf(const float* __restrict a, const float* __restrict b, std::uint32_t d) {
    float s = 0.0f;
#pragma omp simd reduction(+ : s)
    for (std::uint32_t k = 0; k < d; ++k) s += a[k] * b[k];
    return s;
}

// u += g*v and v += g*u, both steps taken from the pre-update rows.
inline void pair_update(float* __restrict a, float* __restrict b, std::uint32_t d, float g) {
#pragma omp simd
    for (std::uint32_t k = 0; k < d; ++k) {
        const float x = a[k];
        const float y = b[k];
        a[k] = x + g * y;
        b[k] = y + g * x;
    }
}

inline void axpy(float* __restrict a, const float* __restrict b, std::uint32_t d, float g) {
#pragma omp simd
    for (std::uint32_t k = 0; k < d; ++k) a[k] += g * b[k];
}

struct SgdKernel {
    EmbeddingMatrix& m;
    const std::vector<std::pair<VertexId, VertexId>>& edges;
    VertexId n_vertices;
    std::uint32_t negatives;
    double lr_start;
    double lr_slope; // per-update linear decay

    void update(std::uint32_t edge_index, std::uint64_t t, const VertexId* negs) const {
        const float lr = static_cast<float>(lr_start - lr_slope * static_cast<double>(t));
        const auto [u, v] = edges[edge_index];
        float* mu = m.row(u);
        float* mv = m.row(v);
        pair_update(mu, mv, m.dim, lr * (1.0f - sigmoidf(dotf(mu, mv, m.dim))));
        for (std::uint32_t j = 0; j < negatives; ++j) {
            const VertexId neg = negs[j];
            const float gn = -lr * sigmoidf(dotf(mu, m.row(neg), m.dim));
            if (neg == u) {
                for (std::uint32_t k = 0; k < m.dim; ++k) mu[k] += gn * mu[k];
            } else {
                axpy(mu, m.row(neg), m.dim, gn);
            }
        }
    }

    void prefetch_row(VertexId v) const {
        const float* p = m.row(v);
        for (std::uint32_t off = 0; off < m.dim; off += 32) __builtin_prefetch(p + off, 1, 1);
    }

    // Runs updates [begin, end) of `perm` with epoch-global positions
    // starting at t0. Negatives for a block are drawn up front so the rows
    // they touch can be prefetched a few updates ahead.
    void run_span(const std::uint32_t* perm, std::uint64_t begin, std::uint64_t end,
                  std::uint64_t t0, Rng& rng, std::vector<VertexId>& neg_buf) const {
        constexpr std::uint64_t kBlock = 512;
        constexpr std::uint64_t kAhead = 8;
        neg_buf.resize(kBlock * std::max<std::uint32_t>(negatives, 1));
        for (std::uint64_t base = begin; base < end; base += kBlock) {
            const std::uint64_t count = std::min(kBlock, end - base);
            for (std::uint64_t j = 0; j < count * negatives; ++j)
                neg_buf[j] = static_cast<VertexId>(bounded(rng, n_vertices));
            for (std::uint64_t j = 0; j < count; ++j) {
                if (j + kAhead < count) {
                    const auto [pu, pv] = edges[perm[base + j + kAhead]];
                    prefetch_row(pu);
                    prefetch_row(pv);
                    for (std::uint32_t s = 0; s < negatives; ++s)
                        prefetch_row(neg_buf[(j + kAhead) * negatives + s]);
                }
                update(perm[base + j], t0 + (base - begin) + j, neg_buf.data() + j * negatives);
            }
        }
    }
};

} // namespace

void train_level(const Graph& g, EmbeddingMatrix& m, std::uint64_t epochs, double lr_start,
                 const TrainConfig& cfg, Rng& rng, int level) {
    if (m.rows != g.vertex_count() || m.dim != cfg.dim)
        throw std::invalid_argument("embedding does not match graph/config");
    if (epochs == 0) return;
    const auto edges = g.edges();
    const std::uint64_t edge_count = edges.size();
    if (edge_count == 0) return;
    if (edge_count > 0xFFFFFFFFull)
        throw std::invalid_argument("edge permutation limited to 2^32 edges");

    const std::uint64_t total_updates = epochs * edge_count;
    const SgdKernel kernel{
        m, edges, g.vertex_count(), cfg.negative_samples, lr_start,
        lr_start * (1.0 - cfg.lr_floor_fraction) / static_cast<double>(total_updates)};

    std::vector<std::uint32_t> perm(edge_count);
    std::iota(perm.begin(), perm.end(), 0u);
    std::vector<VertexId> neg_buf;

    for (std::uint64_t ep = 0; ep < epochs; ++ep) {
        std::shuffle(perm.begin(), perm.end(), rng);
        if (cfg.threads <= 1) {
            kernel.run_span(perm.data(), 0, edge_count, ep * edge_count, rng, neg_buf);
        } else {
            // Lock-free: threads share the matrix and tolerate racy row
            // updates; only the per-thread RNG streams are private.
            std::vector<std::uint64_t> thread_seeds(static_cast<std::size_t>(cfg.threads));
            for (auto& s : thread_seeds) s = rng();
#pragma omp parallel num_threads(cfg.threads)
            {
                const auto tid = static_cast<std::size_t>(omp_get_thread_num());
                const auto nth = static_cast<std::uint64_t>(omp_get_num_threads());
                Rng local(thread_seeds[tid % thread_seeds.size()]);
                std::vector<VertexId> local_negs;
                const std::uint64_t chunk = (edge_count + nth - 1) / nth;
                const std::uint64_t begin = std::min<std::uint64_t>(tid * chunk, edge_count);
                const std::uint64_t end = std::min<std::uint64_t>(begin + chunk, edge_count);
                kernel.run_span(perm.data(), begin, end, ep * edge_count + begin, local, local_negs);
            }
        }
        if (!m.all_finite()) throw TrainError("non-finite embedding value", level, ep);
    }
}

EmbeddingMatrix expand(const EmbeddingMatrix& coarse, const CoarseningMap& m) {
    if (coarse.rows != m.coarse_count)
        throw std::invalid_argument("expand: coarse matrix does not match map");
    EmbeddingMatrix fine(m.map.size(), coarse.dim);
    for (std::size_t v = 0; v < m.map.size(); ++v) {
        if (m.map[v] >= m.coarse_count)
            throw std::invalid_argument("expand: map value out of range");
        std::memcpy(fine.row(v), coarse.row(m.map[v]), sizeof(float) * coarse.dim);
    }
    return fine;
}

EmbeddingMatrix embed_hierarchy(const Hierarchy& h, const TrainConfig& cfg) {
    const int depth = h.depth();
    if (depth < 1) throw std::invalid_argument("empty hierarchy");
    // A zero budget still produces the (expanded) initialization.
    EpochSchedule schedule;
    if (cfg.epochs > 0) schedule = distribute_epochs(cfg.epochs, cfg.smoothing, depth);
    else schedule.per_level.assign(depth, 0);

    Rng rng = make_rng(cfg.seed, "embed");
    EmbeddingMatrix m(h.graphs[static_cast<std::size_t>(depth - 1)].vertex_count(), cfg.dim);
    const float half_range = 0.5f / static_cast<float>(cfg.dim);
    std::uniform_real_distribution<float> init(-half_range, half_range);
    for (auto& x : m.data) x = init(rng);

    for (int i = depth - 1; i >= 0; --i) {
        train_level(h.graphs[static_cast<std::size_t>(i)], m,
                    schedule.per_level[static_cast<std::size_t>(i)], cfg.learning_rate, cfg, rng, i);
        if (i > 0) m = expand(m, h.maps[static_cast<std::size_t>(i - 1)]);
    }
    return m;
}

namespace {

constexpr char kEmbMagic[4] = {'M', 'L', 'E', 'M'};
constexpr std::uint32_t kEmbVersion = 1;

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw ParseError("truncated embedding stream");
    return v;
}

} // namespace

void write_embedding(const EmbeddingMatrix& m, std::ostream& out) {
    out.write(kEmbMagic, 4);
    put<std::uint32_t>(out, kEmbVersion);
    put<std::uint64_t>(out, m.rows);
    put<std::uint32_t>(out, m.dim);
    out.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.data.size() * sizeof(float)));
}

void write_embedding_file(const EmbeddingMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    write_embedding(m, out);
}

EmbeddingMatrix read_embedding(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kEmbMagic, 4) != 0) throw ParseError("bad embedding magic");
    if (get<std::uint32_t>(in) != kEmbVersion) throw ParseError("unsupported embedding version");
    const std::uint64_t rows = get<std::uint64_t>(in);
    const std::uint32_t dim = get<std::uint32_t>(in);
    EmbeddingMatrix m(rows, dim);
    in.read(reinterpret_cast<char*>(m.data.data()),
            static_cast<std::streamsize>(m.data.size() * sizeof(float)));
    if (!in) throw ParseError("truncated embedding data");
    return m;
}

EmbeddingMatrix read_embedding_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    return read_embedding(in);
}

void write_embedding_text(const EmbeddingMatrix& m, std::ostream& out) {
    out << m.rows << ' ' << m.dim << '\n';
    out.precision(9);
    for (std::uint64_t i = 0; i < m.rows; ++i) {
        out << i;
        const float* r = m.row(i);
        for (std::uint32_t k = 0; k < m.dim; ++k) out << ' ' << r[k];
        out << '\n';
    }
}

} // namespace mlge
