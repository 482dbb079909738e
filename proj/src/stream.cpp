#include "kong/stream.hpp"

#include "kong/detail/binary.hpp"
#include "kong/parallel.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <tuple>

namespace kong {

using detail::get;
using detail::put;

namespace {

constexpr std::array<char, 8> kStoreMagic = {'K', 'O', 'N', 'G', 'S', 'T', 'R', '1'};
constexpr std::uint32_t kStoreVersion = 1;

/// Running concatenation of one node's children during a pass; mirrors concat_summaries.
struct NodeBuild {
    BoundaryBuilder builder;
    TensorSketch payload;

    void append(const SketchSummary& child, std::size_t k) {
        if (child.length() >= k) payload.add(child.payload);
        builder.append(child.boundary, [&](std::span<const LabelId> gram) { payload.update(gram, 1.0); });
    }
    SketchSummary finish() { return {builder.finish(), std::move(payload)}; }
};

struct PendingArc {
    std::int64_t key;
    LabelId label;
    std::uint32_t local;
    std::size_t target;
};

void write_boundary(std::ostream& out, const Boundary& b) {
    put<std::uint64_t>(out, b.length());
    const auto tokens = b.tokens();
    put<std::uint32_t>(out, static_cast<std::uint32_t>(tokens.size()));
    for (LabelId t : tokens) put<std::uint32_t>(out, t);
}

Boundary read_boundary(std::istream& in, std::size_t k) {
    const auto length = get<std::uint64_t>(in);
    const auto count = get<std::uint32_t>(in);
    if (count > 2 * k) throw DataError("corrupt checkpoint: boundary too long");
    TokenString tokens(count);
    for (auto& t : tokens) t = get<std::uint32_t>(in);
    return Boundary::restore(k, length, std::move(tokens));
}

std::uint64_t counters_of(const TensorSketch& s) {
    return static_cast<std::uint64_t>(s.degree()) * s.rows() * s.buckets();
}

SketchCounters difference(const SketchCounters& after, const SketchCounters& before) {
    return {after.kgram_hashes - before.kgram_hashes, after.cell_updates - before.cell_updates,
            after.merged_cells - before.merged_cells, after.transforms - before.transforms};
}

void accumulate(SketchCounters& total, const SketchCounters& delta) {
    total.kgram_hashes += delta.kgram_hashes;
    total.cell_updates += delta.cell_updates;
    total.merged_cells += delta.merged_cells;
    total.transforms += delta.transforms;
}

}  // namespace

FileEventSource::FileEventSource(std::filesystem::path path) : path_(std::move(path)) { rewind(); }

std::optional<EdgeEvent> FileEventSource::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        const auto rec = parse_edge_line(line, path_.string(), line_no_);
        if (rec) return EdgeEvent{rec->graph_id, rec->src, rec->dst, rec->order_key};
    }
    return std::nullopt;
}

void FileEventSource::rewind() {
    in_.close();
    in_.clear();
    in_.open(path_);
    if (!in_) throw ParseError(path_.string(), 0, "cannot open event file");
    line_no_ = 0;
}

std::string FileEventSource::where() const { return path_.string() + ":" + std::to_string(line_no_); }

std::optional<EdgeEvent> VectorEventSource::next() {
    if (position_ >= events_.size()) return std::nullopt;
    return events_[position_++];
}

std::string VectorEventSource::where() const { return "event " + std::to_string(position_); }

std::optional<EdgeEvent> OneShotEventSource::next() {
    started_ = true;
    return inner_.next();
}

void OneShotEventSource::rewind() {
    if (started_) throw Error("the event source cannot be replayed");
}

std::vector<EdgeEvent> dataset_events(const GraphDataset& dataset, std::optional<std::uint64_t> shuffle_seed) {
    dataset.validate();
    std::vector<EdgeEvent> events;
    for (std::size_t g = 0; g < dataset.size(); ++g) {
        const Graph& graph = dataset.graphs[g];
        for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
            const auto nbrs = graph.neighbors(v);
            for (std::size_t pos = 0; pos < nbrs.size(); ++pos)
                events.push_back({dataset.graph_ids[g], v, nbrs[pos], static_cast<std::int64_t>(pos)});
        }
    }
    if (shuffle_seed) {
        std::mt19937_64 rng(*shuffle_seed);
        std::shuffle(events.begin(), events.end(), rng);
    }
    return events;
}

NodeTable node_table(const GraphDataset& dataset) {
    dataset.validate();
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return dataset.graph_ids[a] < dataset.graph_ids[b]; });
    NodeTable table;
    table.alphabet = dataset.alphabet;
    for (std::size_t g : order) {
        if (!table.graph_ids.empty() && table.graph_ids.back() == dataset.graph_ids[g])
            throw DataError("duplicate graph id " + std::to_string(dataset.graph_ids[g]));
        table.graph_ids.push_back(dataset.graph_ids[g]);
        table.classes.push_back(dataset.classes[g]);
        table.graph_offsets.push_back(table.labels.size());
        const Graph& graph = dataset.graphs[g];
        for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
            table.index.emplace(std::pair{dataset.graph_ids[g], std::int64_t{v}}, table.labels.size());
            table.labels.push_back(graph.label(v));
        }
    }
    table.graph_offsets.push_back(table.labels.size());
    return table;
}

void validate_stream_config(const FeatureConfig& config) {
    config.validate();
    if (config.mode != FeatureMode::Sketched) throw ConfigError("streaming computes sketched feature maps only");
    if (config.relabel) throw ConfigError("WL relabeling needs whole neighborhoods and is not available when streaming");
    if (config.exact_norm) throw ConfigError("exact norms are not available when streaming");
}

NodeSketchStore::NodeSketchStore(NodeTable table, const FeatureConfig& config)
    : table_(std::move(table)), config_(config) {
    validate_stream_config(config_);
    current_.reserve(table_.node_count());
    for (LabelId label : table_.labels)
        current_.push_back(summarize<TensorSketch>(std::span<const LabelId>(&label, 1), config_.k, zero()));
    if (config_.traversal == TraversalKind::BFS) totals_ = current_;
    observe(0, 0);
}

TensorSketch NodeSketchStore::zero() const {
    return TensorSketch(config_.seed, config_.sketch_size, config_.rows, static_cast<std::size_t>(config_.kernel.p));
}

const SketchSummary& NodeSketchStore::final_summary(std::size_t node) const {
    return config_.traversal == TraversalKind::BFS ? totals_.at(node) : current_.at(node);
}

std::uint64_t NodeSketchStore::counters() const noexcept {
    std::uint64_t total = 0;
    for (const auto& s : current_) total += counters_of(s.payload);
    for (const auto& s : totals_) total += counters_of(s.payload);
    return total;
}

std::uint64_t NodeSketchStore::boundary_tokens() const noexcept {
    std::uint64_t total = 0;
    for (const auto& s : current_) total += s.boundary.stored_tokens();
    for (const auto& s : totals_) total += s.boundary.stored_tokens();
    return total;
}

void NodeSketchStore::observe(std::uint64_t extra_counters, std::uint64_t extra_tokens) {
    stats_.peak_counters = std::max(stats_.peak_counters, counters() + extra_counters);
    stats_.peak_boundary_tokens = std::max(stats_.peak_boundary_tokens, boundary_tokens() + extra_tokens);
}

void NodeSketchStore::save(std::ostream& out) const {
    out.write(kStoreMagic.data(), kStoreMagic.size());
    put<std::uint32_t>(out, kStoreVersion);
    put<std::uint32_t>(out, config_.traversal == TraversalKind::BFS ? 0u : 1u);
    put<std::uint64_t>(out, config_.k);
    put<std::uint64_t>(out, passes_);
    put<std::uint64_t>(out, current_.size());
    const bool has_totals = !totals_.empty();
    for (std::size_t v = 0; v < current_.size(); ++v) {
        write_boundary(out, current_[v].boundary);
        write_sketch(out, current_[v].payload);
        if (has_totals) {
            write_boundary(out, totals_[v].boundary);
            write_sketch(out, totals_[v].payload);
        }
    }
    if (!out) throw Error("failed to write checkpoint");
}

NodeSketchStore NodeSketchStore::load(std::istream& in, NodeTable table, const FeatureConfig& config) {
    NodeSketchStore store(std::move(table), config);
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kStoreMagic) throw DataError("not a stream checkpoint");
    if (get<std::uint32_t>(in) != kStoreVersion) throw DataError("unsupported checkpoint version");
    const auto traversal = get<std::uint32_t>(in) == 0 ? TraversalKind::BFS : TraversalKind::WL;
    const auto k = get<std::uint64_t>(in);
    const auto passes = get<std::uint64_t>(in);
    const auto nodes = get<std::uint64_t>(in);
    if (traversal != config.traversal || k != config.k) throw DataError("checkpoint was written with another traversal or k");
    if (nodes != store.node_count()) throw DataError("checkpoint node count does not match the node table");
    if (passes > config.h) throw DataError("checkpoint has more passes than h");
    const TensorSketch shape = store.zero();
    auto read_summary = [&] {
        Boundary boundary = read_boundary(in, config.k);
        TensorSketch sketch = read_tensor_sketch(in);
        if (!sketch.compatible(shape)) throw DataError("checkpoint sketch parameters do not match the config");
        return SketchSummary{std::move(boundary), std::move(sketch)};
    };
    for (std::size_t v = 0; v < nodes; ++v) {
        store.current_[v] = read_summary();
        if (!store.totals_.empty()) store.totals_[v] = read_summary();
    }
    store.passes_ = passes;
    return store;
}

void stream_pass(EventSource& source, std::size_t pass, NodeSketchStore& store, const StreamOptions& options) {
    const FeatureConfig& config = store.config_;
    const std::size_t k = config.k;
    if (pass != store.passes_ + 1)
        throw ConfigError("pass " + std::to_string(pass) + " cannot follow pass " + std::to_string(store.passes_));
    if (pass > config.h) throw ConfigError("pass " + std::to_string(pass) + " exceeds h = " + std::to_string(config.h));
    if (options.order == StreamOrder::Arrival && config.h > 1)
        throw ConfigError("arrival-order streaming is single pass (h = 1)");
    if (pass > 1 && !source.replayable()) throw Error("pass " + std::to_string(pass) + " needs a replayable event source");
    source.rewind();

    const NodeTable& table = store.table_;
    const std::size_t n = store.node_count();
    const SketchCounters before = sketch_counters();

    auto initial = [&](std::size_t v) {
        const LabelId label = table.labels[v];
        return summarize<TensorSketch>(std::span<const LabelId>(&label, 1), k, store.zero());
    };
    auto start = [&](std::size_t v) {
        NodeBuild build{BoundaryBuilder(k), store.zero()};
        if (config.traversal == TraversalKind::WL) build.append(initial(v), k);
        return build;
    };

    std::vector<SketchSummary> next(n);
    std::vector<std::vector<PendingArc>> pending;
    std::vector<NodeBuild> running;
    if (options.order == StreamOrder::Sorted) {
        pending.resize(n);
    } else {
        running.reserve(n);
        for (std::size_t v = 0; v < n; ++v) running.push_back(start(v));
    }

    std::uint64_t buffered = 0;
    while (const auto event = source.next()) {
        ++store.stats_.events;
        const auto src = table.find(event->graph_id, event->src);
        const auto dst = table.find(event->graph_id, event->dst);
        if (!src || !dst) {
            throw DataError(source.where() + ": event references unlabeled node " +
                            std::to_string(src ? event->dst : event->src) + " of graph " +
                            std::to_string(event->graph_id));
        }
        if (options.order == StreamOrder::Sorted) {
            const auto target = table.entry(*dst);
            pending[*src].push_back({event->order_key, target.label, target.local_id, *dst});
            store.stats_.peak_buffered_events = std::max(store.stats_.peak_buffered_events, ++buffered);
        } else {
            running[*src].append(store.current_[*dst], k);
        }
    }

    if (options.order == StreamOrder::Sorted) {
        parallel_for(n, options.threads, [&](std::size_t v) {
            auto& arcs = pending[v];
            std::sort(arcs.begin(), arcs.end(), [](const PendingArc& x, const PendingArc& y) {
                return std::tie(x.key, x.label, x.local) < std::tie(y.key, y.label, y.local);
            });
            std::vector<std::size_t> targets;
            targets.reserve(arcs.size());
            for (const auto& arc : arcs) targets.push_back(arc.target);
            std::sort(targets.begin(), targets.end());
            if (std::adjacent_find(targets.begin(), targets.end()) != targets.end()) {
                const auto entry = table.entry(v);
                throw DataError("duplicate edge from node " + std::to_string(entry.local_id) + " of graph " +
                                std::to_string(table.graph_ids[entry.graph_index]));
            }
            NodeBuild build = start(v);
            for (const auto& arc : arcs) build.append(store.current_[arc.target], k);
            next[v] = build.finish();
            std::vector<PendingArc>().swap(arcs);
        });
    } else {
        std::uint64_t builder_tokens = 0;
        for (const auto& b : running) builder_tokens += b.builder.stored_tokens();
        store.observe(static_cast<std::uint64_t>(n) * counters_of(store.zero()), builder_tokens);
        for (std::size_t v = 0; v < n; ++v) next[v] = running[v].finish();
        std::vector<NodeBuild>().swap(running);
    }

    std::uint64_t next_counters = 0;
    std::uint64_t next_tokens = 0;
    for (const auto& s : next) {
        next_counters += counters_of(s.payload);
        next_tokens += s.boundary.stored_tokens();
    }
    store.observe(next_counters, next_tokens);

    store.current_ = std::move(next);
    if (config.traversal == TraversalKind::BFS) {
        for (std::size_t v = 0; v < n; ++v) {
            const SketchSummary* parts[] = {&store.totals_[v], &store.current_[v]};
            store.totals_[v] = concat_summaries<TensorSketch>(std::span<const SketchSummary* const>(parts), k, store.zero());
        }
    }
    ++store.passes_;
    store.observe(0, 0);
    accumulate(store.stats_.work, difference(sketch_counters(), before));
}

void stream_passes(EventSource& source, NodeSketchStore& store, const StreamOptions& options) {
    for (std::size_t pass = store.passes_completed() + 1; pass <= store.config().h; ++pass)
        stream_pass(source, pass, store, options);
}

std::vector<FeatureMap> finalize_stream(NodeSketchStore&& store) {
    const FeatureConfig config = store.config_;
    if (store.passes_ != config.h)
        throw ConfigError("finalize needs " + std::to_string(config.h) + " passes, " + std::to_string(store.passes_) +
                          " completed");
    const NodeTable& table = store.table_;
    std::vector<FeatureMap> maps(table.graph_count());
    for (std::size_t g = 0; g < table.graph_count(); ++g) {
        CombinedSketch total(config.seed, config.sketch_size, config.rows, static_cast<std::size_t>(config.kernel.p));
        for (std::size_t v = table.graph_offsets[g]; v < table.graph_offsets[g + 1]; ++v)
            accumulate_node_sketch(total, store.final_summary(v).payload, config);
        maps[g].config = config;
        maps[g].graph_index = g;
        maps[g].sketch = std::move(total);
    }
    store.current_.clear();
    store.current_.shrink_to_fit();
    store.totals_.clear();
    store.totals_.shrink_to_fit();
    return maps;
}

}  // namespace kong
