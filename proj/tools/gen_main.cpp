// Synthetic community graphs with power-law degrees, for benchmarks and
// desk-scale experiments.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "mlge/graph.hpp"
#include "mlge/graphgen.hpp"

int main(int argc, char** argv) {
    CLI::App app{"synthetic graph generator"};
    mlge::GenConfig cfg;
    std::uint64_t vertices = cfg.vertices, edges = cfg.target_edges, communities = cfg.community_count;
    std::string out = "graph.edges";
    bool binary = false;
    app.add_option("--vertices", vertices);
    app.add_option("--edges", edges, "target undirected edge count (approximate)");
    app.add_option("--communities", communities);
    app.add_option("--mixing", cfg.mixing, "fraction of inter-community endpoints");
    app.add_option("--degree-exponent", cfg.degree_exponent);
    app.add_option("--max-degree-fraction", cfg.max_degree_fraction);
    app.add_option("--seed", cfg.seed);
    app.add_option("--out", out);
    app.add_flag("--binary", binary, "write an .mlge cache instead of text");
    CLI11_PARSE(app, argc, argv);

    cfg.vertices = static_cast<mlge::VertexId>(vertices);
    cfg.target_edges = edges;
    cfg.community_count = static_cast<mlge::VertexId>(communities);
    try {
        const mlge::Graph g = mlge::generate_community_graph(cfg);
        if (binary) {
            mlge::write_graph_cache_file(g, out);
        } else {
            std::ofstream f(out);
            mlge::write_edge_list(g, f);
        }
        std::cout << "generated " << g.vertex_count() << " vertices, " << g.edge_count()
                  << " edges -> " << out << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
