#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"

#include "mlge/embed.hpp"
#include "test_util.hpp"

using namespace mlge;

namespace {

double cosine(const float* a, const float* b, std::uint32_t d) {
    double ab = 0, aa = 0, bb = 0;
    for (std::uint32_t k = 0; k < d; ++k) {
        ab += static_cast<double>(a[k]) * b[k];
        aa += static_cast<double>(a[k]) * a[k];
        bb += static_cast<double>(b[k]) * b[k];
    }
    return ab / std::sqrt(aa * bb);
}

CoarseningMap map_of(std::vector<VertexId> values, VertexId coarse) {
    CoarseningMap m;
    m.map = std::move(values);
    m.coarse_count = coarse;
    return m;
}

} // namespace

TEST_CASE("epoch schedule reproduces the slow-preset head value") {
    const EpochSchedule s = distribute_epochs(1400, 0.5, 4);
    REQUIRE(s.per_level.size() == 4);
    CHECK(s.per_level[0] == 222);
    CHECK(s.per_level[1] == 268);
    CHECK(s.per_level[2] == 362);
    CHECK(s.per_level[3] == 548);
    CHECK(std::accumulate(s.per_level.begin(), s.per_level.end(), std::uint64_t{0}) == 1400);
    CHECK(s.per_level[0] >= 215);
    CHECK(s.per_level[0] <= 228);
}

TEST_CASE("epoch schedule walkthrough for a small budget") {
    const EpochSchedule s = distribute_epochs(100, 0.1, 3);
    REQUIRE(s.per_level.size() == 3);
    CHECK(s.per_level[0] == 16);
    CHECK(s.per_level[1] == 29);
    CHECK(s.per_level[2] == 55);
}

TEST_CASE("single level takes the whole budget") {
    const EpochSchedule s = distribute_epochs(73, 0.4, 1);
    CHECK(s.per_level == std::vector<std::uint64_t>{73});
}

TEST_CASE("epoch schedule rejects bad inputs") {
    CHECK_THROWS_AS(distribute_epochs(3, 0.5, 4), std::invalid_argument);
    CHECK_THROWS_AS(distribute_epochs(10, 1.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(distribute_epochs(10, -0.1, 2), std::invalid_argument);
    CHECK_THROWS_AS(distribute_epochs(10, 0.5, 0), std::invalid_argument);
}

TEST_CASE("epoch schedule sums exactly over the fuzz grid") {
    Rng rng = make_rng(201, "t");
    for (double p : {0.0, 0.1, 0.3, 0.5, 0.9}) {
        for (std::size_t depth = 1; depth <= 16; ++depth) {
            for (int i = 0; i < 12; ++i) {
                const std::uint64_t e = depth + bounded(rng, 10'000 - depth + 1);
                const EpochSchedule s = distribute_epochs(e, p, depth);
                CHECK(std::accumulate(s.per_level.begin(), s.per_level.end(), std::uint64_t{0}) == e);
                for (auto epochs : s.per_level) CHECK(epochs >= 1);
                // the geometric component never shrinks toward coarser levels
                const double geo_last =
                    (1.0 - p) * static_cast<double>(e) /
                    (2.0 - std::pow(2.0, 1.0 - static_cast<double>(depth)));
                for (std::size_t lvl = 0; lvl + 1 < depth; ++lvl) {
                    const auto gi = std::llround(geo_last * std::pow(0.5, double(depth - 1 - lvl)));
                    const auto gj = std::llround(geo_last * std::pow(0.5, double(depth - 2 - lvl)));
                    CHECK(gi <= gj);
                }
            }
        }
    }
}

TEST_CASE("zero epochs leave the matrix untouched") {
    const Graph g = test::path_graph(4);
    TrainConfig cfg;
    cfg.dim = 8;
    EmbeddingMatrix m(4, 8);
    Rng init = make_rng(5, "init");
    std::uniform_real_distribution<float> dist(-1, 1);
    for (auto& x : m.data) x = dist(init);
    const EmbeddingMatrix before = m;
    Rng rng = make_rng(5, "train");
    train_level(g, m, 0, 0.05, cfg, rng);
    CHECK(m.data == before.data);
}

TEST_CASE("positive step at orthogonal rows has magnitude lr/2") {
    const Graph g = test::path_graph(2);
    TrainConfig cfg;
    cfg.dim = 2;
    cfg.negative_samples = 0;
    cfg.lr_floor_fraction = 1.0; // constant lr
    EmbeddingMatrix m(2, 2);
    m.row(0)[0] = 0.5f; // rows orthogonal: dot = 0, sigma = 0.5
    m.row(1)[1] = -0.25f;
    Rng rng = make_rng(1, "train");
    train_level(g, m, 1, 0.5, cfg, rng);
    const float step = 0.5f * (1.0f - 0.5f); // lr * (1 - sigma(0))
    CHECK(m.row(0)[0] == doctest::Approx(0.5f));
    CHECK(m.row(0)[1] == doctest::Approx(step * -0.25f));
    CHECK(m.row(1)[0] == doctest::Approx(step * 0.5f));
    CHECK(m.row(1)[1] == doctest::Approx(-0.25f));
}

TEST_CASE("a lone edge aligns its endpoints") {
    const Graph g = test::path_graph(2);
    TrainConfig cfg;
    cfg.dim = 16;
    cfg.negative_samples = 0;
    cfg.lr_floor_fraction = 1.0;
    EmbeddingMatrix m(2, 16);
    Rng init = make_rng(77, "init");
    std::uniform_real_distribution<float> dist(-0.5f / 16, 0.5f / 16);
    for (auto& x : m.data) x = dist(init);

    Rng rng = make_rng(77, "train");
    std::vector<double> cosines;
    for (int ep = 0; ep < 200; ++ep) {
        train_level(g, m, 1, 0.05, cfg, rng);
        cosines.push_back(cosine(m.row(0), m.row(1), 16));
    }
    CHECK(cosines.back() > 0.99);
    // monotone over the last 90% of training
    for (std::size_t i = cosines.size() / 10 + 1; i < cosines.size(); ++i)
        CHECK(cosines[i] >= cosines[i - 1] - 1e-9);
}

TEST_CASE("positive update matches the log-sigmoid gradient") {
    // analytic gradient of log s(u.v) wrt u is (1 - s(u.v)) v; compare the
    // trainer's actual step and central finite differences
    Rng rng = make_rng(301, "t");
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    const std::uint32_t d = 16;
    for (int trial = 0; trial < 10; ++trial) {
        EmbeddingMatrix m(2, d);
        for (auto& x : m.data) x = dist(rng);
        const EmbeddingMatrix before = m;

        const Graph g = test::path_graph(2);
        TrainConfig cfg;
        cfg.dim = d;
        cfg.negative_samples = 0;
        cfg.lr_floor_fraction = 1.0;
        const double lr = 0.125;
        Rng trng = make_rng(trial, "train");
        train_level(g, m, 1, lr, cfg, trng);

        auto log_sigmoid_dot = [&](const std::vector<float>& a, const std::vector<float>& b) {
            double dot = 0;
            for (std::uint32_t k = 0; k < d; ++k) dot += double(a[k]) * b[k];
            return std::log(1.0 / (1.0 + std::exp(-dot)));
        };
        std::vector<float> u(before.row(0), before.row(0) + d);
        std::vector<float> v(before.row(1), before.row(1) + d);
        double grad_norm = 0, err_norm = 0;
        for (std::uint32_t k = 0; k < d; ++k) {
            const double h = 1e-3;
            std::vector<float> up = u, um = u;
            up[k] += static_cast<float>(h);
            um[k] -= static_cast<float>(h);
            const double fd = (log_sigmoid_dot(up, v) - log_sigmoid_dot(um, v)) / (2 * h);
            const double step = (double(m.row(0)[k]) - double(u[k])) / lr; // executed update / lr
            err_norm += (fd - step) * (fd - step);
            grad_norm += fd * fd;
        }
        CHECK(std::sqrt(err_norm) / std::sqrt(grad_norm) < 1e-3);
    }
}

TEST_CASE("training never produces non-finite values at lr 0.25") {
    Rng rng = make_rng(303, "t");
    for (int i = 0; i < 8; ++i) {
        const Graph g = test::random_graph(30 + static_cast<VertexId>(bounded(rng, 100)), 400, rng);
        if (g.edge_count() == 0) continue;
        TrainConfig cfg;
        cfg.dim = 16;
        cfg.negative_samples = 3;
        EmbeddingMatrix m(g.vertex_count(), 16);
        std::uniform_real_distribution<float> dist(-0.5f / 16, 0.5f / 16);
        for (auto& x : m.data) x = dist(rng);
        Rng trng = make_rng(i, "train");
        CHECK_NOTHROW(train_level(g, m, 12, 0.25, cfg, trng));
        CHECK(m.all_finite());
    }
}

TEST_CASE("expand duplicates super-vertex rows") {
    EmbeddingMatrix coarse(3, 2);
    for (VertexId r = 0; r < 3; ++r) {
        coarse.row(r)[0] = static_cast<float>(r);
        coarse.row(r)[1] = static_cast<float>(10 * r);
    }
    SUBCASE("identity map") {
        const auto fine = expand(coarse, map_of({0, 1, 2}, 3));
        CHECK(fine.data == coarse.data);
    }
    SUBCASE("figure grouping: six vertices onto three rows") {
        const auto fine = expand(coarse, map_of({0, 0, 1, 1, 2, 2}, 3));
        REQUIRE(fine.rows == 6);
        for (VertexId v = 0; v < 6; ++v) CHECK(fine.row(v)[0] == doctest::Approx(v / 2));
    }
    SUBCASE("all-to-one map") {
        EmbeddingMatrix one(1, 2);
        one.row(0)[0] = 3.5f;
        one.row(0)[1] = -1.5f;
        const auto fine = expand(one, map_of({0, 0, 0, 0}, 1));
        for (VertexId v = 0; v < 4; ++v) {
            CHECK(fine.row(v)[0] == doctest::Approx(3.5f));
            CHECK(fine.row(v)[1] == doctest::Approx(-1.5f));
        }
    }
    SUBCASE("mismatched sizes are rejected") {
        CHECK_THROWS_AS(expand(coarse, map_of({0, 0}, 2)), std::invalid_argument);
    }
}

TEST_CASE("expanding twice equals expanding the composed map") {
    Rng rng = make_rng(305, "t");
    EmbeddingMatrix coarse(4, 3);
    std::uniform_real_distribution<float> dist(-1, 1);
    for (auto& x : coarse.data) x = dist(rng);
    const CoarseningMap mid = map_of({0, 1, 1, 2, 3, 0}, 4);  // 6 -> 4
    const CoarseningMap fine = map_of({0, 0, 1, 2, 3, 4, 5, 2}, 6); // 8 -> 6
    std::vector<VertexId> composed(8);
    for (VertexId v = 0; v < 8; ++v) composed[v] = mid.map[fine.map[v]];
    const auto two_step = expand(expand(coarse, mid), fine);
    const auto one_step = expand(coarse, map_of(composed, 4));
    CHECK(two_step.data == one_step.data);
}

TEST_CASE("zero-epoch hierarchy embedding is just the expanded initialization") {
    Rng rng = make_rng(315, "t");
    const Graph g = test::random_graph(50, 150, rng);
    CoarsenConfig ccfg;
    ccfg.min_vertices = 2;
    const Hierarchy h = build_hierarchy(g, ccfg);
    TrainConfig cfg;
    cfg.dim = 4;
    cfg.epochs = 0;
    cfg.seed = 17;
    const EmbeddingMatrix m = embed_hierarchy(h, cfg);
    CHECK(m.rows == g.vertex_count());
    // rows grouped by coarsest super-vertex must be identical
    if (h.depth() >= 2) {
        std::vector<VertexId> to_top(g.vertex_count());
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
            VertexId c = v;
            for (const auto& map : h.maps) c = map.map[c];
            to_top[v] = c;
        }
        for (VertexId v = 1; v < g.vertex_count(); ++v)
            if (to_top[v] == to_top[0])
                CHECK(std::equal(m.row(v), m.row(v) + 4, m.row(0)));
    }
}

TEST_CASE("single-level hierarchy trains exactly like train_level") {
    Rng rng = make_rng(307, "t");
    const Graph g = test::random_graph(60, 200, rng);
    Hierarchy h;
    h.graphs.push_back(g);
    h.per_level_stats.push_back({g.vertex_count(), g.edge_count(), 0});

    TrainConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 10;
    cfg.smoothing = 0.3;
    cfg.learning_rate = 0.05;
    cfg.seed = 99;
    const EmbeddingMatrix got = embed_hierarchy(h, cfg);

    Rng replay = make_rng(99, "embed");
    EmbeddingMatrix want(g.vertex_count(), 8);
    std::uniform_real_distribution<float> init(-0.5f / 8, 0.5f / 8);
    for (auto& x : want.data) x = init(replay);
    train_level(g, want, 10, 0.05, cfg, replay);
    CHECK(got.data == want.data);
}

TEST_CASE("fixed seed and one thread are bit-reproducible") {
    Rng rng = make_rng(309, "t");
    const Graph g = test::random_graph(80, 300, rng);
    CoarsenConfig ccfg;
    ccfg.min_vertices = 4;
    const Hierarchy h = build_hierarchy(g, ccfg);
    TrainConfig cfg;
    cfg.dim = 16;
    cfg.epochs = 20;
    cfg.smoothing = 0.3;
    cfg.learning_rate = 0.05;
    cfg.seed = 4242;
    const EmbeddingMatrix a = embed_hierarchy(h, cfg);
    const EmbeddingMatrix b = embed_hierarchy(h, cfg);
    CHECK(a.data == b.data);
}

TEST_CASE("embedding io round trips") {
    Rng rng = make_rng(311, "t");
    EmbeddingMatrix m(7, 5);
    std::uniform_real_distribution<float> dist(-2, 2);
    for (auto& x : m.data) x = dist(rng);

    std::stringstream buf;
    write_embedding(m, buf);
    const EmbeddingMatrix back = read_embedding(buf);
    CHECK(back.rows == m.rows);
    CHECK(back.dim == m.dim);
    CHECK(back.data == m.data);

    std::ostringstream text;
    write_embedding_text(m, text);
    std::istringstream first_line(text.str());
    std::uint64_t rows;
    std::uint32_t dim;
    first_line >> rows >> dim;
    CHECK(rows == 7);
    CHECK(dim == 5);
}

TEST_CASE("hierarchy embedding stays finite and has the right shape") {
    Rng rng = make_rng(313, "t");
    const Graph g = test::random_graph(300, 1200, rng);
    CoarsenConfig ccfg;
    ccfg.min_vertices = 8;
    const Hierarchy h = build_hierarchy(g, ccfg);
    TrainConfig cfg;
    cfg.dim = 16;
    cfg.epochs = 30;
    cfg.smoothing = 0.3;
    cfg.learning_rate = 0.05;
    const EmbeddingMatrix m = embed_hierarchy(h, cfg);
    CHECK(m.rows == g.vertex_count());
    CHECK(m.dim == 16);
    CHECK(m.all_finite());
}
