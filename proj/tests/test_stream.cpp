#include "kong/export.hpp"
#include "kong/stream.hpp"
#include "kong/synthetic.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <sstream>

using namespace kong;

namespace {

FeatureConfig sketched(TraversalKind kind, std::size_t h, std::size_t k, int p) {
    FeatureConfig config;
    config.mode = FeatureMode::Sketched;
    config.traversal = kind;
    config.h = h;
    config.k = k;
    config.kernel = {KernelKind::Poly, p, 0.5};
    config.sketch_size = 64;
    config.rows = 2;
    config.seed = 1234;
    return config;
}

std::vector<FeatureMap> run_stream(const GraphDataset& ds, const FeatureConfig& config, EventSource& source,
                                   const StreamOptions& options = {}) {
    NodeSketchStore store(node_table(ds), config);
    stream_passes(source, store, options);
    return finalize_stream(std::move(store));
}

std::string sparse_text(const std::vector<FeatureMap>& maps, const std::vector<int>& classes) {
    std::ostringstream out;
    write_sparse_features(out, maps, classes);
    return out.str();
}

}  // namespace

TEST_SUITE("stream") {

TEST_CASE("h passes reproduce the in-memory sketches bit for bit") {
    const auto ds = random_dataset(15, {.max_nodes = 12, .max_edges = 30, .alphabet = 4}, 41);
    for (auto kind : {TraversalKind::BFS, TraversalKind::WL}) {
        for (std::size_t h : {0u, 1u, 3u}) {
            for (std::size_t k : {1u, 3u}) {
                for (int p : {1, 2}) {
                    const auto config = sketched(kind, h, k, p);
                    VectorEventSource source(dataset_events(ds, h * 31 + k));
                    const auto streamed = run_stream(ds, config, source);
                    const auto memory = dataset_feature_maps(ds, config, 1);
                    REQUIRE(streamed.size() == memory.size());
                    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(*streamed[i].sketch == *memory[i].sketch);
                    CHECK(sparse_text(streamed, ds.classes) == sparse_text(memory, ds.classes));
                }
            }
        }
    }
}

TEST_CASE("interleaved graphs and arbitrary graph ids") {
    auto ds = random_dataset(3, {.min_nodes = 3, .max_nodes = 6, .max_edges = 12, .alphabet = 3}, 42);
    ds.graph_ids = {70, -5, 12};
    const auto config = sketched(TraversalKind::BFS, 2, 2, 1);
    VectorEventSource source(dataset_events(ds, 5));
    const auto streamed = run_stream(ds, config, source);
    const auto memory = dataset_feature_maps(ds, config, 1);
    // Streamed maps come in ascending graph id order: -5, 12, 70.
    CHECK(*streamed[0].sketch == *memory[1].sketch);
    CHECK(*streamed[1].sketch == *memory[2].sketch);
    CHECK(*streamed[2].sketch == *memory[0].sketch);
}

TEST_CASE("single node graph") {
    GraphDataset ds;
    ds.alphabet = LabelAlphabet::canonical({"x"});
    ds.graphs.emplace_back(std::vector<LabelId>{0}, std::vector<std::vector<std::uint32_t>>{{}});
    ds.classes = {1};
    ds.graph_ids = {0};
    const auto config = sketched(TraversalKind::WL, 2, 1, 1);
    VectorEventSource empty({});
    const auto streamed = run_stream(ds, config, empty);
    CHECK(*streamed[0].sketch == *graph_feature_map(ds.graphs[0], config).sketch);
}

TEST_CASE("empty stream leaves the initialization in place") {
    const auto ds = random_dataset(4, {.max_nodes = 5, .max_edges = 0, .alphabet = 2}, 43);
    const auto config = sketched(TraversalKind::WL, 1, 1, 1);
    NodeSketchStore store(node_table(ds), config);
    const auto before = store.current(0);
    VectorEventSource empty({});
    stream_pass(empty, 1, store);
    // With no neighbors the WL string stays the label.
    CHECK(store.current(0).payload == before.payload);
    CHECK(store.current(0).boundary == before.boundary);
}

TEST_CASE("one pass with k = 1 sketches the 1-hop label counts") {
    const auto ds = random_dataset(5, {.max_nodes = 8, .max_edges = 16, .alphabet = 3}, 44);
    auto config = sketched(TraversalKind::BFS, 1, 1, 1);
    config.kernel.c = 0.0;
    VectorEventSource source(dataset_events(ds, 1));
    const auto streamed = run_stream(ds, config, source);
    for (std::size_t g = 0; g < ds.size(); ++g) {
        const Graph& graph = ds.graphs[g];
        CountSketch expected(config.seed, config.sketch_size, config.rows);
        for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
            const LabelId own = graph.label(v);
            expected.update(std::span<const LabelId>(&own, 1), 1.0);
            for (auto u : graph.neighbors(v)) {
                const LabelId l = graph.label(u);
                expected.update(std::span<const LabelId>(&l, 1), 1.0);
            }
        }
        CHECK(std::equal(expected.table().begin(), expected.table().end(), streamed[g].sketch->values().begin()));
    }
}

TEST_CASE("arrival order mode takes arrival as the neighbor order") {
    const auto ds = random_dataset(6, {.max_nodes = 8, .max_edges = 20, .alphabet = 3}, 45);
    const auto config = sketched(TraversalKind::WL, 1, 2, 2);
    // Events listed in adjacency order but with order keys reversed: the sorted mode would reorder.
    std::vector<EdgeEvent> events;
    for (const auto& e : dataset_events(ds)) events.push_back({e.graph_id, e.src, e.dst, -e.order_key});
    VectorEventSource source(events);
    OneShotEventSource live(source);
    const auto streamed = run_stream(ds, config, live, {StreamOrder::Arrival, 1});
    const auto memory = dataset_feature_maps(ds, config, 1);
    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(*streamed[i].sketch == *memory[i].sketch);

    auto deep = config;
    deep.h = 2;
    NodeSketchStore store(node_table(ds), deep);
    source.rewind();
    CHECK_THROWS_AS(stream_pass(source, 1, store, {StreamOrder::Arrival, 1}), ConfigError);
}

TEST_CASE("errors") {
    const auto ds = random_dataset(2, {.min_nodes = 3, .max_nodes = 3, .max_edges = 3, .alphabet = 2}, 46);
    const auto config = sketched(TraversalKind::BFS, 2, 2, 1);

    SUBCASE("unknown node") {
        NodeSketchStore store(node_table(ds), config);
        VectorEventSource source({{0, 0, 9, 0}});
        CHECK_THROWS_AS(stream_pass(source, 1, store), DataError);
    }
    SUBCASE("duplicate edge") {
        NodeSketchStore store(node_table(ds), config);
        VectorEventSource source({{0, 0, 1, 0}, {0, 0, 1, 5}});
        CHECK_THROWS_AS(stream_pass(source, 1, store), DataError);
    }
    SUBCASE("non-replayable source on a later pass") {
        NodeSketchStore store(node_table(ds), config);
        VectorEventSource inner(dataset_events(ds));
        OneShotEventSource live(inner);
        stream_pass(live, 1, store);
        CHECK_THROWS_AS(stream_pass(live, 2, store), Error);
    }
    SUBCASE("passes out of order and early finalize") {
        NodeSketchStore store(node_table(ds), config);
        VectorEventSource source(dataset_events(ds));
        CHECK_THROWS_AS(stream_pass(source, 2, store), ConfigError);
        CHECK_THROWS_AS(finalize_stream(std::move(store)), ConfigError);
    }
    SUBCASE("unsupported configs") {
        auto exact = config;
        exact.mode = FeatureMode::Exact;
        CHECK_THROWS_AS(NodeSketchStore(node_table(ds), exact), ConfigError);
        auto relabel = config;
        relabel.relabel = true;
        CHECK_THROWS_AS(NodeSketchStore(node_table(ds), relabel), ConfigError);
    }
}

TEST_CASE("file source replays the temporal edge file") {
    const auto ds = random_dataset(8, {.max_nodes = 9, .max_edges = 20, .alphabet = 3}, 47);
    test::TempDir dir;
    const TemporalFiles files{dir.path() / "e.csv", dir.path() / "l.csv", dir.path() / "c.csv"};
    write_temporal_edge_list(ds, files);
    const auto config = sketched(TraversalKind::BFS, 3, 2, 2);
    FileEventSource source(files.edges);
    NodeSketchStore store(read_node_table(files.labels, files.classes), config);
    stream_passes(source, store);
    const auto streamed = finalize_stream(std::move(store));
    const auto memory = dataset_feature_maps(parse_temporal_edge_list(files), config, 1);
    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(*streamed[i].sketch == *memory[i].sketch);
}

TEST_CASE("checkpoint between passes") {
    const auto ds = random_dataset(6, {.max_nodes = 8, .max_edges = 16, .alphabet = 3}, 48);
    for (auto kind : {TraversalKind::BFS, TraversalKind::WL}) {
        const auto config = sketched(kind, 3, 3, 2);
        VectorEventSource source(dataset_events(ds, 3));
        NodeSketchStore first(node_table(ds), config);
        stream_pass(source, 1, first);
        stream_pass(source, 2, first);
        std::stringstream buffer;
        first.save(buffer);
        auto resumed = NodeSketchStore::load(buffer, node_table(ds), config);
        CHECK(resumed.passes_completed() == 2);
        stream_passes(source, resumed);
        const auto streamed = finalize_stream(std::move(resumed));
        const auto memory = dataset_feature_maps(ds, config, 1);
        for (std::size_t i = 0; i < ds.size(); ++i) CHECK(*streamed[i].sketch == *memory[i].sketch);

        auto other = config;
        other.seed += 1;
        std::stringstream again;
        first.save(again);
        CHECK_THROWS_AS(NodeSketchStore::load(again, node_table(ds), other), DataError);
    }
}

TEST_CASE("space and work accounting") {
    const auto ds = random_dataset(20, {.max_nodes = 15, .max_edges = 40, .alphabet = 4}, 49);
    for (auto kind : {TraversalKind::BFS, TraversalKind::WL}) {
        for (std::size_t k : {1u, 2u, 4u}) {
            for (int p : {1, 2}) {
                const auto config = sketched(kind, 2, k, p);
                const auto events = dataset_events(ds, 9);
                VectorEventSource source(events);
                NodeSketchStore store(node_table(ds), config);
                stream_passes(source, store);
                const auto& stats = store.stats();
                const std::uint64_t n = store.node_count();
                const std::uint64_t per_node = static_cast<std::uint64_t>(p) * config.rows * config.sketch_size;
                // Previous and current pass, plus the running S_v for BFS.
                const std::uint64_t copies = kind == TraversalKind::BFS ? 3 : 2;
                CHECK(stats.peak_counters <= copies * n * per_node);
                CHECK(stats.peak_boundary_tokens <= copies * n * 2 * (k - 1));
                CHECK(stats.peak_buffered_events <= events.size());
                CHECK(stats.events == events.size() * config.h);
                // Hashes: one per label per pass plus junction k-grams, at most k-1 per event
                // (two junctions per node for BFS), each touching p * rows cells.
                const std::uint64_t hash_bound = config.h * (2 * n + (k - 1) * (events.size() + 2 * n));
                CHECK(stats.work.kgram_hashes <= hash_bound);
                CHECK(stats.work.cell_updates <= hash_bound * static_cast<std::uint64_t>(p) * config.rows);
            }
        }
    }
}

}  // TEST_SUITE
