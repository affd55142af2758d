// mlge: multi-level graph embedding pipeline.
//
// Subcommands: split, coarsen, embed, evaluate, pipeline. Exit codes:
// 0 ok, 1 usage, 2 data error, 3 internal error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "mlge/coarsen.hpp"
#include "mlge/community.hpp"
#include "mlge/embed.hpp"
#include "mlge/eval.hpp"
#include "mlge/graph.hpp"
#include "mlge/presets.hpp"
#include "mlge/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int default_threads() {
    if (const char* env = std::getenv("MLGE_THREADS")) {
        const int t = std::atoi(env);
        if (t >= 1) return t;
    }
    return 1;
}

std::string gunzip_file(const std::string& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw mlge::ParseError("cannot open " + path);
    std::string out;
    char buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(n));
    const bool bad = n < 0;
    gzclose(f);
    if (bad) throw mlge::ParseError("gzip error while reading " + path);
    return out;
}

// Accepts plain edge lists, .gz edge lists, and .mlge binary caches.
mlge::LoadResult load_graph_input(const std::string& path) {
    if (path.ends_with(".mlge")) {
        mlge::LoadResult r;
        r.graph = mlge::read_graph_cache_file(path);
        r.original_ids.resize(r.graph.vertex_count());
        for (std::size_t i = 0; i < r.original_ids.size(); ++i) r.original_ids[i] = i;
        return r;
    }
    if (path.ends_with(".gz")) {
        std::istringstream in(gunzip_file(path));
        return mlge::load_edge_list(in);
    }
    return mlge::load_edge_list_file(path);
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw mlge::ParseError("cannot open " + path.string() + " for writing");
    out << content;
}

void write_json_file(const fs::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw mlge::ParseError("cannot open " + path.string());
    json j;
    in >> j;
    return j;
}

void write_pairs(const fs::path& path, const std::vector<std::pair<mlge::VertexId, mlge::VertexId>>& pairs) {
    std::ofstream out(path);
    if (!out) throw mlge::ParseError("cannot open " + path.string() + " for writing");
    for (auto [u, v] : pairs) out << u << ' ' << v << '\n';
}

std::vector<std::pair<mlge::VertexId, mlge::VertexId>> read_pairs(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw mlge::ParseError("cannot open " + path.string());
    std::vector<std::pair<mlge::VertexId, mlge::VertexId>> pairs;
    std::uint64_t u, v;
    while (in >> u >> v)
        pairs.emplace_back(static_cast<mlge::VertexId>(u), static_cast<mlge::VertexId>(v));
    return pairs;
}

// ---------------------------------------------------------------------------
// split

struct SplitArtifacts {
    mlge::Graph train;
    std::vector<std::pair<mlge::VertexId, mlge::VertexId>> test_pos, train_neg, test_neg;
    std::vector<std::uint64_t> file_ids; // final train id -> id in the input file
};

// Splits, samples negatives, and re-labels everything into the id space the
// persisted train.edges file will load back to, so the text artifacts are
// consistent by construction.
SplitArtifacts make_split(const mlge::LoadResult& input, double ratio, std::uint64_t seed,
                          bool reject_train_full, bool reject_test_full) {
    mlge::Rng rng = mlge::make_rng(seed, "split");
    mlge::EvalDataset ds = mlge::split(input.graph, ratio, rng);
    mlge::EvalConfig ecfg;
    ecfg.train_negatives_reject_full = reject_train_full;
    ecfg.test_negatives_reject_full = reject_test_full;
    mlge::fill_pairs(ds, input.graph, ecfg, rng);

    // Canonical labeling = whatever load_edge_list assigns to the file we
    // are about to write.
    std::ostringstream buffer;
    mlge::write_edge_list(ds.train_graph, buffer);
    std::istringstream replay(buffer.str());
    mlge::LoadResult reloaded = mlge::load_edge_list(replay);
    std::vector<mlge::VertexId> relabel(ds.train_graph.vertex_count());
    for (mlge::VertexId fresh = 0; fresh < reloaded.graph.vertex_count(); ++fresh)
        relabel[reloaded.original_ids[fresh]] = fresh;

    SplitArtifacts art;
    art.train = std::move(reloaded.graph);
    art.file_ids.resize(ds.kept_ids.size());
    for (std::size_t old = 0; old < ds.kept_ids.size(); ++old)
        art.file_ids[relabel[old]] = input.original_ids[ds.kept_ids[old]];
    auto negatives = [&](const std::vector<mlge::PairExample>& pairs) {
        std::vector<std::pair<mlge::VertexId, mlge::VertexId>> out;
        for (const auto& p : pairs)
            if (p.label == 0) out.emplace_back(relabel[p.u], relabel[p.v]);
        return out;
    };
    for (auto [u, v] : ds.test_pos) art.test_pos.emplace_back(relabel[u], relabel[v]);
    art.train_neg = negatives(ds.train_pairs);
    art.test_neg = negatives(ds.test_pairs);
    return art;
}

void persist_split(const SplitArtifacts& art, const fs::path& dir) {
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "train.edges");
        if (!out) throw mlge::ParseError("cannot write train.edges");
        mlge::write_edge_list(art.train, out);
    }
    write_pairs(dir / "test_pos.pairs", art.test_pos);
    write_pairs(dir / "train_neg.pairs", art.train_neg);
    write_pairs(dir / "test_neg.pairs", art.test_neg);
    std::ostringstream ids;
    for (auto id : art.file_ids) ids << id << '\n';
    write_text_file(dir / "idmap.txt", ids.str());
}

mlge::EvalDataset load_split_dataset(const fs::path& dir) {
    mlge::EvalDataset ds;
    mlge::LoadResult train = mlge::load_edge_list_file((dir / "train.edges").string());
    ds.train_graph = std::move(train.graph);
    ds.test_pos = read_pairs(dir / "test_pos.pairs");
    for (auto [u, v] : ds.train_graph.edges()) ds.train_pairs.push_back({u, v, 1});
    for (auto [u, v] : read_pairs(dir / "train_neg.pairs")) ds.train_pairs.push_back({u, v, 0});
    for (auto [u, v] : ds.test_pos) ds.test_pairs.push_back({u, v, 1});
    for (auto [u, v] : read_pairs(dir / "test_neg.pairs")) ds.test_pairs.push_back({u, v, 0});
    return ds;
}

// ---------------------------------------------------------------------------
// coarsen artifacts

void persist_hierarchy(const mlge::Hierarchy& h, const fs::path& dir) {
    fs::create_directories(dir);
    char name[32];
    for (int i = 0; i < h.depth(); ++i) {
        std::snprintf(name, sizeof(name), "level_%03d.mlge", i);
        mlge::write_graph_cache_file(h.graphs[static_cast<std::size_t>(i)], (dir / name).string());
    }
    for (std::size_t i = 0; i < h.maps.size(); ++i) {
        std::snprintf(name, sizeof(name), "map_%03zu.mlcm", i);
        mlge::write_coarsening_map_file(h.maps[i], static_cast<std::uint32_t>(i), (dir / name).string());
    }
    write_text_file(dir / "stats.json", mlge::stats_json(h) + "\n");
}

mlge::Hierarchy load_hierarchy(const fs::path& dir, int max_levels = -1) {
    mlge::Hierarchy h;
    char name[32];
    for (int i = 0;; ++i) {
        if (max_levels >= 0 && i >= max_levels) break;
        std::snprintf(name, sizeof(name), "level_%03d.mlge", i);
        const fs::path p = dir / name;
        if (!fs::exists(p)) break;
        h.graphs.push_back(mlge::read_graph_cache_file(p.string()));
        h.per_level_stats.push_back({h.graphs.back().vertex_count(), h.graphs.back().edge_count(), 0.0});
    }
    if (h.graphs.empty()) throw mlge::ParseError("no hierarchy levels under " + dir.string());
    for (int i = 0; i + 1 < h.depth(); ++i) {
        std::snprintf(name, sizeof(name), "map_%03d.mlcm", i);
        h.maps.push_back(mlge::read_coarsening_map_file((dir / name).string()).first);
    }
    return h;
}

// ---------------------------------------------------------------------------
// shared flag bundles

struct CoarsenFlags {
    std::string strategy = "novel";
    bool no_ordering = false;
    bool no_hub_restriction = false;
    double hub_multiplier = 2.0;
    int max_depth = 15;
    std::uint64_t min_vertices = 100;
    double stop_threshold = 0.83;

    mlge::CoarsenConfig to_config(std::uint64_t seed, int threads) const {
        mlge::CoarsenConfig cfg;
        try {
            cfg.strategy = mlge::strategy_from_name(strategy);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        cfg.use_ordering = !no_ordering;
        cfg.use_hub_restriction = !no_hub_restriction;
        cfg.hub_threshold_multiplier = hub_multiplier;
        cfg.max_depth = max_depth;
        cfg.min_vertices = static_cast<mlge::VertexId>(min_vertices);
        cfg.stop_threshold = stop_threshold;
        cfg.seed = seed;
        cfg.threads = threads;
        if (cfg.max_depth < 1) throw UsageError("--max-depth must be >= 1");
        if (cfg.min_vertices < 1) throw UsageError("--min-vertices must be >= 1");
        if (!(cfg.stop_threshold > 0 && cfg.stop_threshold <= 1))
            throw UsageError("--stop-threshold must be in (0, 1]");
        return cfg;
    }

    void add_to(CLI::App* cmd) {
        cmd->add_option("--strategy", strategy, "anti|random|novel|louvain");
        cmd->add_flag("--no-ordering", no_ordering, "disable degree-descending processing");
        cmd->add_flag("--no-hub-restriction", no_hub_restriction, "disable the hub^2 rule");
        cmd->add_option("--hub-multiplier", hub_multiplier,
                        "hub threshold = multiplier * |E|/|V| (2 = average degree)");
        cmd->add_option("--max-depth", max_depth, "hierarchy depth cap");
        cmd->add_option("--min-vertices", min_vertices, "stop below this many vertices");
        cmd->add_option("--stop-threshold", stop_threshold, "stop when |V_i+1|/|V_i| exceeds this");
    }
};

struct EmbedFlags {
    std::string preset;
    std::uint64_t epochs = 0; // 0 = take from preset
    double lr = 0;
    double smoothing = -1;
    std::uint64_t dim = 128;
    std::uint64_t negatives = 3;
    double lr_floor = 0.1;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--preset", preset, "ultra-fast|fast|normal|slow|no-coarse");
        cmd->add_option("--epochs", epochs, "total epoch budget (overrides preset)");
        cmd->add_option("--lr", lr, "initial learning rate");
        cmd->add_option("--smoothing", smoothing, "uniform share p of the epoch budget");
        cmd->add_option("--dim", dim, "embedding dimension");
        cmd->add_option("--neg", negatives, "negative samples per positive update");
        cmd->add_option("--lr-floor", lr_floor, "fraction of lr left at the end of a level");
    }

    // Resolves preset + overrides against the graph scale.
    mlge::TrainConfig to_config(std::uint64_t vertices, std::uint64_t seed, int threads) const {
        mlge::TrainConfig cfg;
        cfg.dim = static_cast<std::uint32_t>(dim);
        cfg.negative_samples = static_cast<std::uint32_t>(negatives);
        cfg.lr_floor_fraction = lr_floor;
        cfg.seed = seed;
        cfg.threads = threads;
        if (!preset.empty()) {
            const mlge::Preset* p = nullptr;
            try {
                p = &mlge::preset_by_name(preset);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            cfg.smoothing = p->smoothing;
            cfg.learning_rate = p->learning_rate;
            cfg.epochs = mlge::preset_epochs(*p, vertices);
        }
        if (epochs > 0) cfg.epochs = epochs;
        if (lr > 0) cfg.learning_rate = lr;
        if (smoothing >= 0) {
            if (smoothing >= 1) throw UsageError("--smoothing must be in [0, 1)");
            cfg.smoothing = smoothing;
        }
        if (preset.empty() && (cfg.epochs == 0 || cfg.learning_rate <= 0))
            throw UsageError("give --preset or all of --epochs/--lr/--smoothing");
        return cfg;
    }

    bool no_coarse() const { return preset == "no-coarse"; }
};

// ---------------------------------------------------------------------------
// commands

int cmd_split(const std::string& input, double ratio, std::uint64_t seed, const std::string& out_dir,
              bool reject_train_full, bool no_reject_test_full) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw UsageError("--ratio must be in (0, 1)");
    const mlge::LoadResult in = load_graph_input(input);
    const SplitArtifacts art =
        make_split(in, ratio, seed, reject_train_full, !no_reject_test_full);
    persist_split(art, out_dir);
    write_json_file(fs::path(out_dir) / "split_manifest.json",
                    json{{"input", input},
                         {"ratio", ratio},
                         {"seed", seed},
                         {"reject_train_full", reject_train_full},
                         {"reject_test_full", !no_reject_test_full},
                         {"train_vertices", art.train.vertex_count()},
                         {"train_edges", art.train.edge_count()},
                         {"test_positives", art.test_pos.size()}});
    std::cout << "split: " << art.train.vertex_count() << " train vertices, "
              << art.train.edge_count() << " train edges, " << art.test_pos.size()
              << " test positives -> " << out_dir << "\n";
    return 0;
}

int cmd_coarsen(const std::string& input, CoarsenFlags& flags, std::uint64_t seed, int threads,
                const std::string& out_dir) {
    const mlge::CoarsenConfig cfg = flags.to_config(seed, threads);
    const mlge::LoadResult in = load_graph_input(input);
    const auto t0 = std::chrono::steady_clock::now();
    const mlge::Hierarchy h = mlge::build_hierarchy(in.graph, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    persist_hierarchy(h, out_dir);
    write_json_file(fs::path(out_dir) / "coarsen_manifest.json",
                    json{{"input", input},
                         {"strategy", flags.strategy},
                         {"use_ordering", !flags.no_ordering},
                         {"use_hub_restriction", !flags.no_hub_restriction},
                         {"hub_multiplier", flags.hub_multiplier},
                         {"max_depth", flags.max_depth},
                         {"min_vertices", flags.min_vertices},
                         {"stop_threshold", flags.stop_threshold},
                         {"seed", seed},
                         {"threads", threads},
                         {"depth", h.depth()},
                         {"coarsen_seconds", secs}});
    std::cout << "coarsen: depth " << h.depth() << ", last level "
              << h.graphs.back().vertex_count() << " vertices / " << h.graphs.back().edge_count()
              << " edges in " << secs << " s\n"
              << mlge::stats_json(h) << "\n";
    return 0;
}

int cmd_embed(const std::string& hierarchy_dir, const std::string& graph_path, EmbedFlags& flags,
              std::uint64_t seed, int threads, const std::string& out, bool text) {
    if (hierarchy_dir.empty() && graph_path.empty())
        throw UsageError("give --hierarchy or --graph");
    mlge::Hierarchy h;
    if (!hierarchy_dir.empty()) {
        h = load_hierarchy(hierarchy_dir, flags.no_coarse() ? 1 : -1);
    } else {
        h.graphs.push_back(load_graph_input(graph_path).graph);
        h.per_level_stats.push_back({h.graphs[0].vertex_count(), h.graphs[0].edge_count(), 0.0});
    }
    const mlge::TrainConfig cfg = flags.to_config(h.graphs[0].vertex_count(), seed, threads);
    if (cfg.epochs == 0) std::cerr << "warning: zero epochs, writing the initialization\n";

    const auto t0 = std::chrono::steady_clock::now();
    const mlge::EmbeddingMatrix m = mlge::embed_hierarchy(h, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    mlge::write_embedding_file(m, out);
    if (text) {
        std::ofstream tout(out + ".txt");
        mlge::write_embedding_text(m, tout);
    }
    write_json_file(fs::path(out + ".manifest.json"),
                    json{{"hierarchy", hierarchy_dir},
                         {"graph", graph_path},
                         {"preset", flags.preset},
                         {"depth", h.depth()},
                         {"dim", cfg.dim},
                         {"epochs", cfg.epochs},
                         {"learning_rate", cfg.learning_rate},
                         {"smoothing", cfg.smoothing},
                         {"negative_samples", cfg.negative_samples},
                         {"seed", seed},
                         {"threads", threads},
                         {"train_seconds", secs}});
    std::cout << "embed: " << m.rows << " x " << m.dim << " in " << secs << " s -> " << out << "\n";
    return 0;
}

int cmd_evaluate(const std::string& embedding, const std::string& split_dir, std::uint64_t seed,
                 int threads, const std::string& out) {
    const mlge::EmbeddingMatrix m = mlge::read_embedding_file(embedding);
    mlge::EvalDataset ds = load_split_dataset(split_dir);
    mlge::EvalConfig cfg;
    cfg.threads = threads;
    mlge::Rng rng = mlge::make_rng(seed, "eval");
    const mlge::EvalReport r = mlge::evaluate(m, ds, cfg, rng);

    json report{{"embedding", embedding},
                {"split_dir", split_dir},
                {"auc", r.auc},
                {"fit_seconds", r.fit_seconds},
                {"score_seconds", r.score_seconds}};
    const fs::path emb_manifest = embedding + ".manifest.json";
    if (fs::exists(emb_manifest)) {
        const json em = read_json_file(emb_manifest);
        for (const char* k : {"preset", "depth", "train_seconds"})
            if (em.contains(k)) report[k] = em[k];
    }
    if (!out.empty()) write_json_file(out, report);
    std::cout << "auc " << r.auc << "\n";
    return 0;
}

struct PipelineArgs {
    std::string input;
    std::string out_dir = "mlge-run";
    double ratio = 0.8;
    std::uint64_t seed = 0;
    int threads = default_threads();
    CoarsenFlags coarsen;
    EmbedFlags embed;
};

json pipeline_manifest(const PipelineArgs& a) {
    return json{{"input", a.input},
                {"out_dir", a.out_dir},
                {"ratio", a.ratio},
                {"seed", a.seed},
                {"threads", a.threads},
                {"strategy", a.coarsen.strategy},
                {"use_ordering", !a.coarsen.no_ordering},
                {"use_hub_restriction", !a.coarsen.no_hub_restriction},
                {"hub_multiplier", a.coarsen.hub_multiplier},
                {"max_depth", a.coarsen.max_depth},
                {"min_vertices", a.coarsen.min_vertices},
                {"stop_threshold", a.coarsen.stop_threshold},
                {"preset", a.embed.preset},
                {"epochs", a.embed.epochs},
                {"learning_rate", a.embed.lr},
                {"smoothing", a.embed.smoothing},
                {"dim", a.embed.dim},
                {"negative_samples", a.embed.negatives},
                {"lr_floor", a.embed.lr_floor}};
}

void pipeline_args_from_manifest(const json& j, PipelineArgs& a) {
    a.input = j.value("input", a.input);
    a.out_dir = j.value("out_dir", a.out_dir);
    a.ratio = j.value("ratio", a.ratio);
    a.seed = j.value("seed", a.seed);
    a.threads = j.value("threads", a.threads);
    a.coarsen.strategy = j.value("strategy", a.coarsen.strategy);
    a.coarsen.no_ordering = !j.value("use_ordering", true);
    a.coarsen.no_hub_restriction = !j.value("use_hub_restriction", true);
    a.coarsen.hub_multiplier = j.value("hub_multiplier", a.coarsen.hub_multiplier);
    a.coarsen.max_depth = j.value("max_depth", a.coarsen.max_depth);
    a.coarsen.min_vertices = j.value("min_vertices", a.coarsen.min_vertices);
    a.coarsen.stop_threshold = j.value("stop_threshold", a.coarsen.stop_threshold);
    a.embed.preset = j.value("preset", a.embed.preset);
    a.embed.epochs = j.value("epochs", a.embed.epochs);
    a.embed.lr = j.value("learning_rate", a.embed.lr);
    a.embed.smoothing = j.value("smoothing", a.embed.smoothing);
    a.embed.dim = j.value("dim", a.embed.dim);
    a.embed.negatives = j.value("negative_samples", a.embed.negatives);
    a.embed.lr_floor = j.value("lr_floor", a.embed.lr_floor);
}

int cmd_pipeline(PipelineArgs& a) {
    if (a.input.empty()) throw UsageError("--input is required");
    if (!(a.ratio > 0.0 && a.ratio < 1.0)) throw UsageError("--ratio must be in (0, 1)");
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    write_json_file(dir / "run_manifest.json", pipeline_manifest(a));

    std::string stage = "split";
    try {
        const mlge::LoadResult in = load_graph_input(a.input);
        const SplitArtifacts art = make_split(in, a.ratio, a.seed, false, true);
        persist_split(art, dir / "split");

        stage = "coarsen";
        mlge::Hierarchy h;
        double coarsen_seconds = 0;
        if (a.embed.no_coarse()) {
            h.graphs.push_back(art.train);
            h.per_level_stats.push_back({art.train.vertex_count(), art.train.edge_count(), 0.0});
        } else {
            const mlge::CoarsenConfig ccfg = a.coarsen.to_config(a.seed, a.threads);
            const auto t0 = std::chrono::steady_clock::now();
            h = mlge::build_hierarchy(art.train, ccfg);
            coarsen_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        persist_hierarchy(h, dir / "hierarchy");

        stage = "embed";
        const mlge::TrainConfig tcfg =
            a.embed.to_config(h.graphs[0].vertex_count(), a.seed, a.threads);
        const auto t1 = std::chrono::steady_clock::now();
        const mlge::EmbeddingMatrix m = mlge::embed_hierarchy(h, tcfg);
        const double train_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
        mlge::write_embedding_file(m, (dir / "embedding.mlem").string());

        stage = "evaluate";
        mlge::EvalDataset ds;
        ds.train_graph = art.train;
        ds.test_pos = art.test_pos;
        for (auto [u, v] : ds.train_graph.edges()) ds.train_pairs.push_back({u, v, 1});
        for (auto [u, v] : art.train_neg) ds.train_pairs.push_back({u, v, 0});
        for (auto [u, v] : art.test_pos) ds.test_pairs.push_back({u, v, 1});
        for (auto [u, v] : art.test_neg) ds.test_pairs.push_back({u, v, 0});
        mlge::EvalConfig ecfg;
        ecfg.threads = a.threads;
        mlge::Rng eval_rng = mlge::make_rng(a.seed, "eval");
        const mlge::EvalReport r = mlge::evaluate(m, ds, ecfg, eval_rng);

        json per_level = json::array();
        for (std::size_t i = 0; i < h.per_level_stats.size(); ++i)
            per_level.push_back(json{{"level", i},
                                     {"vertices", h.per_level_stats[i].vertices},
                                     {"edges", h.per_level_stats[i].edges},
                                     {"coarsen_ms", h.per_level_stats[i].coarsen_ms}});
        const json report{{"graph", a.input},
                          {"strategy", a.embed.no_coarse() ? "none" : a.coarsen.strategy},
                          {"preset", a.embed.preset.empty() ? "custom" : a.embed.preset},
                          {"depth", h.depth()},
                          {"per_level", per_level},
                          {"train_seconds", train_seconds},
                          {"coarsen_seconds", coarsen_seconds},
                          {"auc", r.auc}};
        write_json_file(dir / "report.json", report);
        std::cout << report.dump(2) << "\n";
        return 0;
    } catch (const UsageError&) {
        throw;
    } catch (const mlge::ParseError& e) {
        throw mlge::ParseError("stage " + stage + " failed: " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("stage " + stage + " failed: " + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error("stage " + stage + " failed: " + e.what());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-level graph embedding toolkit"};
    app.require_subcommand(1);

    // split
    std::string s_input, s_out = "mlge-split";
    double s_ratio = 0.8;
    std::uint64_t s_seed = 0;
    bool s_reject_train_full = false, s_no_reject_test_full = false;
    auto* split_cmd = app.add_subcommand("split", "hold out test edges and sample negatives");
    split_cmd->add_option("--input", s_input)->required();
    split_cmd->add_option("--ratio", s_ratio, "train edge fraction");
    split_cmd->add_option("--seed", s_seed);
    split_cmd->add_option("--out-dir", s_out);
    split_cmd->add_flag("--reject-train-full", s_reject_train_full,
                        "reject train negatives against the full graph too");
    split_cmd->add_flag("--no-reject-test-full", s_no_reject_test_full,
                        "test negatives only avoid train edges");

    // coarsen
    std::string c_input, c_out = "mlge-hierarchy";
    std::uint64_t c_seed = 0;
    int c_threads = default_threads();
    CoarsenFlags c_flags;
    auto* coarsen_cmd = app.add_subcommand("coarsen", "build a coarsening hierarchy");
    coarsen_cmd->add_option("--input", c_input)->required();
    c_flags.add_to(coarsen_cmd);
    coarsen_cmd->add_option("--seed", c_seed);
    coarsen_cmd->add_option("--threads", c_threads);
    coarsen_cmd->add_option("--out-dir", c_out);

    // embed
    std::string e_hierarchy, e_graph, e_out = "embedding.mlem";
    std::uint64_t e_seed = 0;
    int e_threads = default_threads();
    bool e_text = false;
    EmbedFlags e_flags;
    auto* embed_cmd = app.add_subcommand("embed", "train embeddings over a hierarchy");
    embed_cmd->add_option("--hierarchy", e_hierarchy, "directory from `mlge coarsen`");
    embed_cmd->add_option("--graph", e_graph, "train without coarsening on this graph");
    e_flags.add_to(embed_cmd);
    embed_cmd->add_option("--seed", e_seed);
    embed_cmd->add_option("--threads", e_threads);
    embed_cmd->add_option("--out", e_out);
    embed_cmd->add_flag("--text", e_text, "also write the text format");

    // evaluate
    std::string v_embedding, v_split, v_out;
    std::uint64_t v_seed = 0;
    int v_threads = default_threads();
    auto* eval_cmd = app.add_subcommand("evaluate", "link-prediction AUCROC for an embedding");
    eval_cmd->add_option("--embedding", v_embedding)->required();
    eval_cmd->add_option("--split-dir", v_split)->required();
    eval_cmd->add_option("--seed", v_seed);
    eval_cmd->add_option("--threads", v_threads);
    eval_cmd->add_option("--out", v_out, "report JSON path");

    // pipeline
    PipelineArgs p;
    std::string p_manifest;
    auto* pipe_cmd = app.add_subcommand("pipeline", "split + coarsen + embed + evaluate");
    pipe_cmd->add_option("--manifest", p_manifest, "run manifest JSON (flags override)");
    pipe_cmd->add_option("--input", p.input);
    pipe_cmd->add_option("--ratio", p.ratio);
    pipe_cmd->add_option("--seed", p.seed);
    pipe_cmd->add_option("--threads", p.threads);
    pipe_cmd->add_option("--out-dir", p.out_dir);
    p.coarsen.add_to(pipe_cmd);
    p.embed.add_to(pipe_cmd);

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return 1;
        }

        if (*split_cmd)
            return cmd_split(s_input, s_ratio, s_seed, s_out, s_reject_train_full,
                             s_no_reject_test_full);
        if (*coarsen_cmd) return cmd_coarsen(c_input, c_flags, c_seed, c_threads, c_out);
        if (*embed_cmd)
            return cmd_embed(e_hierarchy, e_graph, e_flags, e_seed, e_threads, e_out, e_text);
        if (*eval_cmd) return cmd_evaluate(v_embedding, v_split, v_seed, v_threads, v_out);
        if (*pipe_cmd) {
            if (!p_manifest.empty()) {
                PipelineArgs m = p;
                pipeline_args_from_manifest(read_json_file(p_manifest), m);
                // explicitly passed flags win over manifest values
                const auto given = [&](const char* name) { return pipe_cmd->count(name) > 0; };
                if (!given("--input")) p.input = m.input;
                if (!given("--ratio")) p.ratio = m.ratio;
                if (!given("--seed")) p.seed = m.seed;
                if (!given("--threads")) p.threads = m.threads;
                if (!given("--out-dir")) p.out_dir = m.out_dir;
                if (!given("--strategy")) p.coarsen.strategy = m.coarsen.strategy;
                if (!given("--no-ordering")) p.coarsen.no_ordering = m.coarsen.no_ordering;
                if (!given("--no-hub-restriction"))
                    p.coarsen.no_hub_restriction = m.coarsen.no_hub_restriction;
                if (!given("--hub-multiplier")) p.coarsen.hub_multiplier = m.coarsen.hub_multiplier;
                if (!given("--max-depth")) p.coarsen.max_depth = m.coarsen.max_depth;
                if (!given("--min-vertices")) p.coarsen.min_vertices = m.coarsen.min_vertices;
                if (!given("--stop-threshold")) p.coarsen.stop_threshold = m.coarsen.stop_threshold;
                if (!given("--preset")) p.embed.preset = m.embed.preset;
                if (!given("--epochs")) p.embed.epochs = m.embed.epochs;
                if (!given("--lr")) p.embed.lr = m.embed.lr;
                if (!given("--smoothing")) p.embed.smoothing = m.embed.smoothing;
                if (!given("--dim")) p.embed.dim = m.embed.dim;
                if (!given("--neg")) p.embed.negatives = m.embed.negatives;
                if (!given("--lr-floor")) p.embed.lr_floor = m.embed.lr_floor;
            }
            return cmd_pipeline(p);
        }
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const mlge::ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
