// Compares the serial reference kernels against their OpenMP counterparts:
// novel coarsening, contraction, and one lock-free training epoch.

#include <chrono>
#include <iostream>
#include <vector>

#include "CLI11.hpp"

#include "mlge/coarsen.hpp"
#include "mlge/embed.hpp"
#include "mlge/graph.hpp"
#include "mlge/graphgen.hpp"

namespace {

double seconds(auto fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP kernel benchmark"};
    std::uint64_t vertices = 500'000, edges = 2'500'000, seed = 7;
    int threads = 4;
    std::string input;
    app.add_option("--input", input, "graph to benchmark on (default: synthetic)");
    app.add_option("--vertices", vertices);
    app.add_option("--edges", edges);
    app.add_option("--threads", threads);
    app.add_option("--seed", seed);
    CLI11_PARSE(app, argc, argv);

    try {
        mlge::Graph g;
        if (input.empty()) {
            mlge::GenConfig cfg;
            cfg.vertices = static_cast<mlge::VertexId>(vertices);
            cfg.target_edges = edges;
            cfg.community_count = static_cast<mlge::VertexId>(std::max<std::uint64_t>(vertices / 500, 1));
            cfg.seed = seed;
            std::cout << "generating " << vertices << " vertices / ~" << edges << " edges...\n";
            g = mlge::generate_community_graph(cfg);
        } else {
            g = mlge::load_edge_list_file(input).graph;
        }
        std::cout << "graph: " << g.vertex_count() << " vertices, " << g.edge_count() << " edges\n";
        std::cout << "kernel                 serial(s)  omp-" << threads << "(s)  speedup  check\n";

        mlge::CoarseningMap m_serial, m_par;
        const double t_cs = seconds([&] { m_serial = mlge::coarsen_novel_serial(g, true, true, 2.0); });
        const double t_cp = seconds([&] {
            m_par = mlge::coarsen_novel_parallel(g, true, true, 2.0, threads);
        });
        m_serial.validate_partition();
        m_par.validate_partition();
        std::printf("novel coarsening        %8.3f  %8.3f  %6.2fx  |V'| %u vs %u\n", t_cs, t_cp,
                    t_cs / t_cp, m_serial.coarse_count, m_par.coarse_count);

        mlge::Graph c_serial, c_par;
        const double t_ks = seconds([&] { c_serial = mlge::contract_serial(g, m_serial); });
        const double t_kp = seconds([&] { c_par = mlge::contract_parallel(g, m_serial, threads); });
        std::printf("contract                %8.3f  %8.3f  %6.2fx  %s\n", t_ks, t_kp, t_ks / t_kp,
                    c_serial == c_par ? "identical" : "MISMATCH");

        mlge::TrainConfig tc;
        tc.dim = 128;
        tc.seed = seed;
        mlge::Rng rng = mlge::make_rng(seed, "bench");
        mlge::EmbeddingMatrix m(g.vertex_count(), tc.dim);
        std::uniform_real_distribution<float> init(-0.5f / 128, 0.5f / 128);
        for (auto& x : m.data) x = init(rng);
        mlge::EmbeddingMatrix m2 = m;

        tc.threads = 1;
        mlge::Rng r1 = mlge::make_rng(seed, "bench-train");
        const double t_ts = seconds([&] { mlge::train_level(g, m, 1, 0.035, tc, r1); });
        tc.threads = threads;
        mlge::Rng r2 = mlge::make_rng(seed, "bench-train");
        const double t_tp = seconds([&] { mlge::train_level(g, m2, 1, 0.035, tc, r2); });
        std::printf("one training epoch      %8.3f  %8.3f  %6.2fx  finite %s/%s\n", t_ts, t_tp,
                    t_ts / t_tp, m.all_finite() ? "yes" : "no", m2.all_finite() ? "yes" : "no");
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
