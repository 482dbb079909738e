#pragma once

#include "kong/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kong {

struct BenchmarkOptions {
    /// Add the reverse of every edge (benchmark molecules are undirected).
    bool undirected = false;
};

/// Reads a benchmark directory: <DS>_A.txt, <DS>_graph_indicator.txt, <DS>_graph_labels.txt,
/// <DS>_node_labels.txt and optionally <DS>_edge_order.txt. The prefix <DS> is detected from
/// the *_A.txt file. Node ids are 1-based in the files and renumbered per graph from 0.
GraphDataset parse_benchmark_dataset(const std::filesystem::path& directory,
                                     const BenchmarkOptions& options = {});

/// Writes the benchmark layout (no edge order file; adjacency order is line order).
void write_benchmark_dataset(const GraphDataset& dataset, const std::filesystem::path& directory,
                             const std::string& name);

struct TemporalFiles {
    std::filesystem::path edges;   ///< "graph_id,src,dst,order_key"
    std::filesystem::path labels;  ///< "graph_id,node,label"
    std::optional<std::filesystem::path> classes;  ///< "graph_id,class"
};

/// Node registry shared by the in-memory parser and the streaming reader, so both assign
/// identical label ids, graph indices and local node ids.
struct NodeTable {
    struct Entry {
        std::size_t graph_index;
        std::uint32_t local_id;
        LabelId label;
    };

    LabelAlphabet alphabet;
    std::vector<std::int64_t> graph_ids;     ///< ascending
    std::vector<int> classes;                ///< per graph; 0 when no class file
    std::vector<std::size_t> graph_offsets;  ///< global index of each graph's first node; size graphs+1
    std::vector<LabelId> labels;             ///< per global node, graphs contiguous, local ids ascending
    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> index;  ///< (graph_id, node) -> global

    std::size_t node_count() const noexcept { return labels.size(); }
    std::size_t graph_count() const noexcept { return graph_ids.size(); }

    /// Global node index of (graph_id, node); nullopt when unlabeled.
    std::optional<std::size_t> find(std::int64_t graph_id, std::int64_t node) const;
    Entry entry(std::size_t global) const;
};

NodeTable read_node_table(const std::filesystem::path& labels,
                          const std::optional<std::filesystem::path>& classes);

/// One line of the temporal edge file.
struct EdgeRecord {
    std::int64_t graph_id;
    std::int64_t src;
    std::int64_t dst;
    std::int64_t order_key;
};

/// Parses "graph_id,src,dst,order_key"; returns nullopt for blank and '#' comment lines.
std::optional<EdgeRecord> parse_edge_line(std::string_view line, const std::string& file, std::size_t line_no);

/// Adjacency of each node sorted by (order_key, neighbor label id, neighbor node id).
GraphDataset parse_temporal_edge_list(const TemporalFiles& files);

/// Writes edges with order_key = position in the adjacency list, node labels and classes.
void write_temporal_edge_list(const GraphDataset& dataset, const TemporalFiles& files);

}  // namespace kong
