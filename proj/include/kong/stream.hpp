#pragma once

#include "kong/dataset_io.hpp"
#include "kong/feature_map.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kong {

/// One directed labeled edge of the stream: src gets dst as a neighbor, positioned by order_key.
struct EdgeEvent {
    std::int64_t graph_id = 0;
    std::int64_t src = 0;
    std::int64_t dst = 0;
    std::int64_t order_key = 0;

    bool operator==(const EdgeEvent&) const = default;
};

class EventSource {
public:
    virtual ~EventSource() = default;

    /// Next event, or nullopt at the end of the stream.
    virtual std::optional<EdgeEvent> next() = 0;
    /// Restarts the stream from its first event. Throws Error when the source cannot replay.
    virtual void rewind() = 0;
    virtual bool replayable() const noexcept = 0;
    /// Position of the last event for error messages, e.g. "edges.csv:12".
    virtual std::string where() const { return "event stream"; }
};

/// Events read from a "graph_id,src,dst,order_key" file.
class FileEventSource : public EventSource {
public:
    explicit FileEventSource(std::filesystem::path path);

    std::optional<EdgeEvent> next() override;
    void rewind() override;
    bool replayable() const noexcept override { return true; }
    std::string where() const override;

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t line_no_ = 0;
};

class VectorEventSource : public EventSource {
public:
    explicit VectorEventSource(std::vector<EdgeEvent> events) : events_(std::move(events)) {}

    std::optional<EdgeEvent> next() override;
    void rewind() override { position_ = 0; }
    bool replayable() const noexcept override { return true; }
    std::string where() const override;

private:
    std::vector<EdgeEvent> events_;
    std::size_t position_ = 0;
};

/// Wraps a source so it can be read once, like a live feed.
class OneShotEventSource : public EventSource {
public:
    explicit OneShotEventSource(EventSource& inner) : inner_(inner) {}

    std::optional<EdgeEvent> next() override;
    void rewind() override;
    bool replayable() const noexcept override { return false; }
    std::string where() const override { return inner_.where(); }

private:
    EventSource& inner_;
    bool started_ = false;
};

/// Events of every arc of the dataset with order_key = position in the adjacency list. With a
/// seed the event order is shuffled (order keys are unchanged).
std::vector<EdgeEvent> dataset_events(const GraphDataset& dataset, std::optional<std::uint64_t> shuffle_seed = {});

/// Node registry of a dataset, as read_node_table would build it from the dataset's files.
NodeTable node_table(const GraphDataset& dataset);

enum class StreamOrder {
    /// Each pass buffers a node's incident events and applies them in (order_key, label id,
    /// node id) order, the adjacency order of parse_temporal_edge_list.
    Sorted,
    /// Single-pass real-time mode: arrival order is the neighbor order; no buffering.
    Arrival,
};

struct StreamOptions {
    StreamOrder order = StreamOrder::Sorted;
    /// Workers for the per-node part of a pass, partitioned by node (0 = all cores).
    unsigned threads = 1;
};

/// Space and work accounting of a streaming run.
struct StreamStats {
    std::uint64_t events = 0;
    /// Largest number of sketch counters alive at once.
    std::uint64_t peak_counters = 0;
    /// Largest number of boundary tokens alive at once.
    std::uint64_t peak_boundary_tokens = 0;
    /// Largest number of events held in per-node pass buffers.
    std::uint64_t peak_buffered_events = 0;
    /// Sketch operations of the calling thread during the passes.
    SketchCounters work;
};

using SketchSummary = StringSummary<TensorSketch>;

/// Per-node streaming state: the summary of s_v^i of the last completed pass, plus the
/// running summary of S_v for BFS.
class NodeSketchStore {
public:
    /// Pass 0: every node's summary is its label.
    NodeSketchStore(NodeTable table, const FeatureConfig& config);

    const NodeTable& table() const noexcept { return table_; }
    const FeatureConfig& config() const noexcept { return config_; }
    std::size_t node_count() const noexcept { return current_.size(); }
    std::size_t passes_completed() const noexcept { return passes_; }

    /// Summary of s_v^i for the last completed pass i.
    const SketchSummary& current(std::size_t node) const { return current_.at(node); }
    /// Summary of S_v^i: the BFS accumulation, or s_v^i for WL.
    const SketchSummary& final_summary(std::size_t node) const;

    /// Sketch counters and boundary tokens held right now.
    std::uint64_t counters() const noexcept;
    std::uint64_t boundary_tokens() const noexcept;

    const StreamStats& stats() const noexcept { return stats_; }

    /// Binary checkpoint: a header with the pass count and the sketch parameters, then per node
    /// its boundaries and sketches in the sketch binary format.
    void save(std::ostream& out) const;
    /// Restores a checkpoint; the table and config must match the ones it was written with.
    static NodeSketchStore load(std::istream& in, NodeTable table, const FeatureConfig& config);

private:
    friend void stream_pass(EventSource& source, std::size_t pass, NodeSketchStore& store,
                            const StreamOptions& options);
    friend std::vector<FeatureMap> finalize_stream(NodeSketchStore&& store);

    TensorSketch zero() const;
    void observe(std::uint64_t extra_counters, std::uint64_t extra_tokens);

    NodeTable table_;
    FeatureConfig config_;
    std::size_t passes_ = 0;
    std::vector<SketchSummary> initial_;
    std::vector<SketchSummary> current_;
    std::vector<SketchSummary> totals_;
    StreamStats stats_;
};

/// Checks that a config can be computed by streaming (sketched, no relabeling, estimated norms).
void validate_stream_config(const FeatureConfig& config);

/// Pass `pass` (1-based, must follow the last completed pass): builds every node's s_v^pass from
/// the frozen pass-1 summaries of its out-neighbors. Throws DataError for events naming unknown
/// nodes or repeating an edge, and Error when a pass after the first needs a non-replayable source.
void stream_pass(EventSource& source, std::size_t pass, NodeSketchStore& store, const StreamOptions& options = {});

/// Runs passes 1..config.h.
void stream_passes(EventSource& source, NodeSketchStore& store, const StreamOptions& options = {});

/// Per-graph feature maps in graph id order; node sketches are finalized and summed exactly as
/// graph_feature_map does. Consumes the store.
std::vector<FeatureMap> finalize_stream(NodeSketchStore&& store);

}  // namespace kong
