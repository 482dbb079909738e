#include "kong/classifier.hpp"
#include "kong/dataset_io.hpp"
#include "kong/export.hpp"
#include "kong/feature_map.hpp"
#include "kong/stream.hpp"
#include "kong/synthetic.hpp"
#include "kong/traversal.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

namespace {

using namespace kong;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitOracle = 3;

/// Raised when an oracle comparison finds a discrepancy.
class OracleFailure : public Error {
public:
    using Error::Error;
};

struct InputOptions {
    std::string directory;
    std::string edges;
    std::string labels;
    std::string classes;
    bool undirected = false;
};

struct FeatureOptions {
    std::string preset;
    std::string kernel = "poly";
    std::string traversal = "bfs";
    std::string mode = "exact";
    std::size_t k = 2;
    std::size_t h = 2;
    int p = 1;
    double c = 0.0;
    bool relabel = false;
    std::size_t sketch_size = 1024;
    std::size_t rows = 5;
    std::uint64_t seed = 1;
    bool shuffle = false;
    bool exact_norm = false;
    unsigned threads = 0;
};

struct OutputOptions {
    std::string format = "sparse";
    std::string out;
};

struct Flags {
    std::map<std::string, CLI::Option*> options;
    bool given(const std::string& name) const {
        auto it = options.find(name);
        return it != options.end() && it->second->count() > 0;
    }
};

int verbosity = 0;

void log(const std::string& message) {
    if (verbosity > 0) std::cerr << message << '\n';
}

void add_input_options(CLI::App* app, InputOptions& in) {
    app->add_option("dataset", in.directory, "Benchmark dataset directory (<DS>_A.txt, ...)");
    app->add_option("--edges", in.edges, "Temporal edge file: graph_id,src,dst,order_key");
    app->add_option("--labels", in.labels, "Node label file: graph_id,node,label");
    app->add_option("--classes", in.classes, "Graph class file: graph_id,class");
    app->add_flag("--undirected", in.undirected, "Add reverse edges to benchmark graphs");
}

void add_feature_options(CLI::App* app, FeatureOptions& f, Flags& flags) {
    flags.options["preset"] = app->add_option("--preset", f.preset, "Shorthand such as poly-rlb-1 or cosine-2");
    flags.options["kernel"] = app->add_option("--kernel", f.kernel, "Base kernel: poly or cosine");
    flags.options["traversal"] = app->add_option("--traversal", f.traversal, "String traversal: bfs or wl");
    flags.options["mode"] = app->add_option("--mode", f.mode, "exact or sketched");
    flags.options["k"] = app->add_option("--k", f.k, "k-gram length");
    flags.options["h"] = app->add_option("--h", f.h, "Traversal depth");
    flags.options["p"] = app->add_option("--p", f.p, "Kernel degree");
    flags.options["c"] = app->add_option("--c", f.c, "Polynomial kernel offset");
    flags.options["relabel"] = app->add_flag("--relabel", f.relabel, "One WL relabeling round first");
    flags.options["sketch-size"] = app->add_option("--sketch-size", f.sketch_size, "Buckets per sketch row");
    flags.options["rows"] = app->add_option("--rows", f.rows, "Sketch rows");
    flags.options["seed"] = app->add_option("--seed", f.seed, "Hash and shuffle seed");
    flags.options["shuffle"] = app->add_flag("--shuffle", f.shuffle, "Shuffle every neighborhood first");
    flags.options["exact-norm"] = app->add_flag("--exact-norm", f.exact_norm, "Sketched cosine with exact norms");
    flags.options["threads"] = app->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

void add_output_options(CLI::App* app, OutputOptions& o, bool with_format) {
    if (with_format) app->add_option("--format", o.format, "sparse or dense");
    app->add_option("--out", o.out, "Output file (default: standard output)");
}

FeatureConfig build_config(const FeatureOptions& f, const Flags& flags) {
    FeatureConfig config;
    if (!f.preset.empty()) apply_preset(config, f.preset);
    if (flags.given("kernel") || f.preset.empty()) {
        if (f.kernel == "poly") {
            config.kernel.kind = KernelKind::Poly;
        } else if (f.kernel == "cosine") {
            config.kernel.kind = KernelKind::Cosine;
        } else {
            throw ConfigError("unknown kernel '" + f.kernel + "' (expected poly or cosine)");
        }
    }
    if (flags.given("c")) {
        if (config.kernel.kind == KernelKind::Cosine) throw ConfigError("--c cannot be combined with the cosine kernel");
        config.kernel.c = f.c;
    }
    if (flags.given("p") || f.preset.empty()) config.kernel.p = f.p;
    if (flags.given("relabel")) config.relabel = f.relabel;
    config.traversal = parse_traversal_kind(f.traversal);
    if (f.mode == "exact") {
        config.mode = FeatureMode::Exact;
    } else if (f.mode == "sketched") {
        config.mode = FeatureMode::Sketched;
    } else {
        throw ConfigError("unknown mode '" + f.mode + "' (expected exact or sketched)");
    }
    config.k = f.k;
    config.h = f.h;
    config.sketch_size = f.sketch_size;
    config.rows = f.rows;
    config.seed = f.seed;
    config.exact_norm = f.exact_norm;
    config.validate();
    return config;
}

GraphDataset load_dataset(const InputOptions& in) {
    const bool temporal = !in.edges.empty() || !in.labels.empty();
    if (temporal == !in.directory.empty())
        throw ConfigError("give either a benchmark directory or --edges and --labels");
    if (temporal) {
        if (in.edges.empty() || in.labels.empty()) throw ConfigError("--edges and --labels go together");
        TemporalFiles files{in.edges, in.labels, {}};
        if (!in.classes.empty()) files.classes = in.classes;
        auto ds = parse_temporal_edge_list(files);
        if (in.undirected)
            for (auto& g : ds.graphs) g = symmetrize(g);
        return ds;
    }
    return parse_benchmark_dataset(in.directory, {in.undirected});
}

/// Runs `write` against --out or standard output.
template <class Write>
void emit(const OutputOptions& o, Write&& write) {
    if (o.out.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream file(o.out, std::ios::binary);
    if (!file) throw DataError("cannot write " + o.out);
    write(file);
    if (!file) throw DataError("failed writing " + o.out);
}

void write_features(const OutputOptions& o, const std::vector<FeatureMap>& maps, const std::vector<int>& classes) {
    if (o.format != "sparse" && o.format != "dense") throw ConfigError("unknown format '" + o.format + "'");
    emit(o, [&](std::ostream& out) {
        if (o.format == "sparse") {
            write_sparse_features(out, maps, classes);
        } else {
            write_dense_features(out, maps, classes);
        }
    });
}

GraphDataset prepared(const InputOptions& in, const FeatureOptions& f) {
    GraphDataset ds = load_dataset(in);
    log("loaded " + std::to_string(ds.size()) + " graphs");
    if (f.shuffle) ds = shuffle_neighborhoods(ds, f.seed);
    return ds;
}

// ---- oracle check

struct OracleReport {
    std::size_t graphs = 0;
    std::size_t runs = 0;
    double max_discrepancy = 0.0;
    std::ptrdiff_t max_excess = std::numeric_limits<std::ptrdiff_t>::min();
    std::size_t skipped = 0;
};

double discrepancy(const KGramVector& a, const KGramVector& b) {
    double worst = 0.0;
    for (const auto& [gram, x] : a.entries()) worst = std::max(worst, std::abs(x - b.get(gram)));
    for (const auto& [gram, y] : b.entries()) worst = std::max(worst, std::abs(y - a.get(gram)));
    return worst;
}

OracleReport oracle_check(const GraphDataset& ds, std::size_t k_max, std::size_t h_max, bool corrupt,
                          std::uint64_t cap) {
    OracleReport report;
    report.graphs = ds.size();
    for (const Graph& g : ds.graphs) {
        for (auto kind : {TraversalKind::BFS, TraversalKind::WL}) {
            for (std::size_t h = 0; h <= h_max; ++h) {
                NodeStrings strings;
                try {
                    strings = traversal_strings(g, kind, h, cap);
                } catch (const StringLengthExceeded&) {
                    ++report.skipped;
                    continue;
                }
                for (std::size_t k = 1; k <= k_max; ++k) {
                    CsgtStats stats;
                    auto summaries = run_csgt_summaries<KGramVector>(g, kind, h, k, {}, &stats);
                    if (corrupt && !summaries.empty()) {
                        const LabelId label = g.label(0);
                        summaries[0].payload.update(std::span<const LabelId>(&label, 1), 1.0);
                    }
                    for (std::size_t v = 0; v < g.node_count(); ++v) {
                        const auto expected = count_kgrams(strings.final_strings[v], k);
                        report.max_discrepancy = std::max(report.max_discrepancy, discrepancy(summaries[v].payload, expected));
                    }
                    for (auto excess : stats.worst_node_excess) report.max_excess = std::max(report.max_excess, excess);
                    const auto accumulate_bound = static_cast<std::ptrdiff_t>((k - 1) * g.node_count());
                    for (auto created : stats.accumulate_kgrams)
                        report.max_excess = std::max(report.max_excess, static_cast<std::ptrdiff_t>(created) - accumulate_bound);
                    ++report.runs;
                }
            }
        }
    }
    return report;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explicit feature maps for graphs with ordered neighborhoods"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    app.add_flag("-v,--verbose", verbosity, "Log progress to standard error");

    InputOptions input;
    FeatureOptions features;
    OutputOptions output;
    Flags flags;

    auto* features_cmd = app.add_subcommand("features", "Compute graph feature maps");
    add_input_options(features_cmd, input);
    add_feature_options(features_cmd, features, flags);
    add_output_options(features_cmd, output, true);

    Flags gram_flags;
    auto* gram_cmd = app.add_subcommand("gram", "Compute the Gram matrix as CSV");
    add_input_options(gram_cmd, input);
    add_feature_options(gram_cmd, features, gram_flags);
    add_output_options(gram_cmd, output, false);

    Flags train_flags;
    CrossValidationOptions cv;
    std::string c_grid = "0.1,1,10";
    std::string model_out;
    auto* train_cmd = app.add_subcommand("train", "Cross-validate a linear classifier on the feature maps");
    add_input_options(train_cmd, input);
    add_feature_options(train_cmd, features, train_flags);
    add_output_options(train_cmd, output, false);
    train_cmd->add_option("--folds", cv.folds, "Outer folds");
    train_cmd->add_option("--repetitions", cv.repetitions, "Repetitions with fresh folds");
    train_cmd->add_option("--c-grid", c_grid, "Comma-separated C values");
    train_cmd->add_option("--inner-folds", cv.inner_folds, "Folds used to pick C");
    train_cmd->add_option("--epochs", cv.epochs, "Training epochs");
    train_cmd->add_option("--model-out", model_out, "Also fit on all graphs and save the model here");

    Flags stream_flags;
    std::size_t passes = 0;
    std::string order = "sorted";
    std::string checkpoint;
    std::string resume;
    auto* stream_cmd = app.add_subcommand("stream", "Compute sketched feature maps in passes over an edge stream");
    add_input_options(stream_cmd, input);
    add_feature_options(stream_cmd, features, stream_flags);
    add_output_options(stream_cmd, output, true);
    auto* passes_opt = stream_cmd->add_option("--passes", passes, "Number of passes h");
    stream_cmd->add_option("--order", order, "sorted (by order key) or arrival");
    stream_cmd->add_option("--checkpoint", checkpoint, "Write the node store here after every pass");
    stream_cmd->add_option("--resume", resume, "Continue from a checkpoint");

    std::size_t random_graphs = 0;
    std::string fixture;
    std::size_t k_max = 4;
    std::size_t h_max = 3;
    bool corrupt = false;
    std::uint64_t oracle_seed = 1;
    std::uint64_t cap = kDefaultStringCap;
    auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare incremental k-gram vectors with explicit strings");
    add_input_options(oracle_cmd, input);
    oracle_cmd->add_option("--random", random_graphs, "Check this many seeded random graphs");
    oracle_cmd->add_option("--fixture", fixture, "Check a bundled fixture (eight-node)");
    oracle_cmd->add_option("--k-max", k_max, "Largest k");
    oracle_cmd->add_option("--h-max", h_max, "Largest h");
    oracle_cmd->add_option("--seed", oracle_seed, "Seed of the random suite");
    oracle_cmd->add_option("--string-cap", cap, "Token cap of the explicit strings");
    oracle_cmd->add_flag("--corrupt", corrupt, "Test hook: perturb one summary so the check must fail");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (features_cmd->parsed()) {
            const auto config = build_config(features, flags);
            const auto ds = prepared(input, features);
            const auto maps = dataset_feature_maps(ds, config, features.threads);
            write_features(output, maps, ds.classes);
        } else if (gram_cmd->parsed()) {
            const auto config = build_config(features, gram_flags);
            const auto ds = prepared(input, features);
            const auto gram = gram_matrix(ds, config, features.threads);
            emit(output, [&](std::ostream& out) { write_gram_csv(out, gram, ds.graph_ids); });
        } else if (train_cmd->parsed()) {
            const auto config = build_config(features, train_flags);
            const auto ds = prepared(input, features);
            cv.seed = features.seed;
            cv.threads = features.threads;
            cv.c_grid.clear();
            std::stringstream grid(c_grid);
            for (std::string item; std::getline(grid, item, ',');) {
                try {
                    cv.c_grid.push_back(std::stod(item));
                } catch (const std::exception&) {
                    throw ConfigError("bad --c-grid value '" + item + "'");
                }
            }
            const auto maps = dataset_feature_maps(ds, config, features.threads);
            std::size_t dimension = 0;
            const auto rows = feature_rows(maps, &dimension);
            const auto start = std::chrono::steady_clock::now();
            const auto result = cross_validate(rows, dimension, ds.classes, cv);
            const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            emit(output, [&](std::ostream& out) {
                out << "graphs " << ds.size() << "\nfeatures " << dimension << "\nfolds " << cv.folds
                    << "\nrepetitions " << cv.repetitions << "\nc_grid " << c_grid << "\naccuracy_mean " << format_number(result.mean)
                    << "\naccuracy_std " << format_number(result.stddev) << "\nseconds " << format_number(seconds) << '\n';
            });
            if (!model_out.empty()) {
                std::ofstream file(model_out);
                if (!file) throw DataError("cannot write " + model_out);
                // The C picked most often by the inner searches.
                std::map<double, std::size_t> votes;
                for (double c : result.chosen_c) ++votes[c];
                const double C = std::max_element(votes.begin(), votes.end(),
                                                  [](const auto& a, const auto& b) { return a.second < b.second; })->first;
                train(rows, dimension, ds.classes, {C, cv.epochs, cv.seed}).save(file);
            }
        } else if (stream_cmd->parsed()) {
            auto config_flags = stream_flags;
            if (!stream_flags.given("mode")) features.mode = "sketched";
            if (passes_opt->count() > 0) {
                if (stream_flags.given("h") && features.h != passes) throw ConfigError("--h and --passes disagree");
                features.h = passes;
            }
            const auto config = build_config(features, config_flags);
            if (input.edges.empty() || input.labels.empty()) throw ConfigError("stream needs --edges and --labels");
            if (features.shuffle || input.undirected) throw ConfigError("--shuffle and --undirected do not apply to streams");
            StreamOptions options;
            options.threads = features.threads;
            if (order == "sorted") {
                options.order = StreamOrder::Sorted;
            } else if (order == "arrival") {
                options.order = StreamOrder::Arrival;
            } else {
                throw ConfigError("unknown order '" + order + "'");
            }
            std::optional<std::filesystem::path> classes;
            if (!input.classes.empty()) classes = input.classes;
            NodeTable table = read_node_table(input.labels, classes);
            const std::vector<int> graph_classes = table.classes;
            std::unique_ptr<NodeSketchStore> store;
            if (resume.empty()) {
                store = std::make_unique<NodeSketchStore>(std::move(table), config);
            } else {
                std::ifstream in(resume, std::ios::binary);
                if (!in) throw DataError("cannot read " + resume);
                store = std::make_unique<NodeSketchStore>(NodeSketchStore::load(in, std::move(table), config));
            }
            FileEventSource file_source(input.edges);
            for (std::size_t pass = store->passes_completed() + 1; pass <= config.h; ++pass) {
                stream_pass(file_source, pass, *store, options);
                log("pass " + std::to_string(pass) + " done, " + std::to_string(store->stats().events) + " events");
                if (!checkpoint.empty()) {
                    std::ofstream out(checkpoint, std::ios::binary);
                    if (!out) throw DataError("cannot write " + checkpoint);
                    store->save(out);
                }
            }
            const auto& stats = store->stats();
            log("peak counters " + std::to_string(stats.peak_counters) + ", peak boundary tokens " +
                std::to_string(stats.peak_boundary_tokens));
            const auto maps = finalize_stream(std::move(*store));
            write_features(output, maps, graph_classes);
        } else if (oracle_cmd->parsed()) {
            GraphDataset ds;
            if (fixture == "eight-node") {
                ds = eight_node_dataset();
            } else if (!fixture.empty()) {
                throw ConfigError("unknown fixture '" + fixture + "'");
            } else if (random_graphs > 0) {
                ds = random_dataset(random_graphs, {}, oracle_seed);
            } else {
                ds = load_dataset(input);
            }
            const auto report = oracle_check(ds, k_max, h_max, corrupt, cap);
            const bool pass = report.max_discrepancy == 0.0 && report.max_excess <= 0 && report.runs > 0;
            std::cout << "graphs " << report.graphs << "\nruns " << report.runs << "\nskipped " << report.skipped
                      << "\nmax_discrepancy " << format_number(report.max_discrepancy) << "\njunction_bound_excess "
                      << (report.runs > 0 ? report.max_excess : 0) << "\nstatus " << (pass ? "pass" : "fail") << '\n';
            if (!pass) throw OracleFailure("oracle check failed");
        }
    } catch (const OracleFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitOracle;
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
