#pragma once

#include "kong/common.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kong {

/// Bijection between raw label strings and dense ids 0..size()-1.
class LabelAlphabet {
public:
    LabelAlphabet() = default;

    /// Builds an alphabet whose ids follow the canonical label order (see canonical_label_less).
    static LabelAlphabet canonical(std::vector<std::string> raw_labels);

    /// Returns the id of `raw`, inserting it with the next free id when absent.
    LabelId intern(std::string_view raw);

    std::optional<LabelId> find(std::string_view raw) const;
    const std::string& name(LabelId id) const;
    std::size_t size() const noexcept { return names_.size(); }

    bool operator==(const LabelAlphabet& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, LabelId> ids_;
};

/// Integers (numerically) before other strings (lexicographically).
bool canonical_label_less(std::string_view a, std::string_view b);

/// Node-labeled graph whose adjacency lists carry an explicit neighbor order.
class Graph {
public:
    Graph() = default;

    /// Validates ids and duplicate-free adjacency; throws DataError on violation.
    Graph(std::vector<LabelId> labels, std::vector<std::vector<std::uint32_t>> adjacency,
          bool directed = true);

    std::size_t node_count() const noexcept { return labels_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    bool directed() const noexcept { return directed_; }

    LabelId label(std::uint32_t v) const { return labels_[v]; }
    std::span<const LabelId> labels() const noexcept { return labels_; }

    /// Out-neighbors of `v` in their traversal order.
    std::span<const std::uint32_t> neighbors(std::uint32_t v) const { return adjacency_[v]; }
    const std::vector<std::vector<std::uint32_t>>& adjacency() const noexcept { return adjacency_; }

    bool operator==(const Graph& other) const = default;

private:
    std::vector<LabelId> labels_;
    std::vector<std::vector<std::uint32_t>> adjacency_;
    std::size_t edge_count_ = 0;
    bool directed_ = true;
};

/// A labeled collection of graphs sharing one label alphabet.
struct GraphDataset {
    std::vector<Graph> graphs;
    std::vector<int> classes;
    /// External graph identifiers (file ids); defaults to the index.
    std::vector<std::int64_t> graph_ids;
    LabelAlphabet alphabet;

    std::size_t size() const noexcept { return graphs.size(); }

    /// Throws DataError if the parallel vectors disagree in length.
    void validate() const;

    bool operator==(const GraphDataset& other) const = default;
};

/// Independently permutes every adjacency list with a generator seeded by `seed`.
Graph shuffle_neighborhoods(const Graph& graph, std::uint64_t seed);

/// Shuffles every graph; graph i uses a seed derived from (seed, i).
GraphDataset shuffle_neighborhoods(const GraphDataset& dataset, std::uint64_t seed);

/// Adds the reverse of every edge that is missing one. Reverse edges are appended
/// after the existing neighbors of their source node.
Graph symmetrize(const Graph& graph);

/// Renumbers nodes: node v of `graph` becomes node perm[v]. Labels and neighbor order follow.
Graph permute_nodes(const Graph& graph, std::span<const std::uint32_t> perm);

/// Disjoint union; nodes of `b` are shifted by a.node_count().
Graph disjoint_union(const Graph& a, const Graph& b);

}  // namespace kong
