#include "kong/graph.hpp"

#include "kong/hash.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <random>
#include <unordered_set>

namespace kong {

namespace {

std::optional<long long> as_integer(std::string_view s) {
    long long value = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) return std::nullopt;
    return value;
}

}  // namespace

bool canonical_label_less(std::string_view a, std::string_view b) {
    const auto ia = as_integer(a);
    const auto ib = as_integer(b);
    if (ia && ib) return *ia != *ib ? *ia < *ib : a < b;
    if (ia != ib) return ia.has_value();
    return a < b;
}

LabelAlphabet LabelAlphabet::canonical(std::vector<std::string> raw_labels) {
    std::sort(raw_labels.begin(), raw_labels.end(),
              [](const std::string& a, const std::string& b) { return canonical_label_less(a, b); });
    raw_labels.erase(std::unique(raw_labels.begin(), raw_labels.end()), raw_labels.end());
    LabelAlphabet alphabet;
    for (const auto& raw : raw_labels) alphabet.intern(raw);
    return alphabet;
}

LabelId LabelAlphabet::intern(std::string_view raw) {
    std::string key(raw);
    if (auto it = ids_.find(key); it != ids_.end()) return it->second;
    if (names_.size() >= static_cast<std::size_t>(kBiasToken))
        throw DataError("label alphabet exhausted");
    const auto id = static_cast<LabelId>(names_.size());
    names_.push_back(key);
    ids_.emplace(std::move(key), id);
    return id;
}

std::optional<LabelId> LabelAlphabet::find(std::string_view raw) const {
    auto it = ids_.find(std::string(raw));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

const std::string& LabelAlphabet::name(LabelId id) const {
    if (id >= names_.size()) throw DataError("label id " + std::to_string(id) + " not in alphabet");
    return names_[id];
}

Graph::Graph(std::vector<LabelId> labels, std::vector<std::vector<std::uint32_t>> adjacency,
             bool directed)
    : labels_(std::move(labels)), adjacency_(std::move(adjacency)), directed_(directed) {
    if (adjacency_.size() != labels_.size()) {
        throw DataError("graph has " + std::to_string(labels_.size()) + " labels but " +
                        std::to_string(adjacency_.size()) + " adjacency lists");
    }
    const std::size_t n = labels_.size();
    std::vector<std::uint32_t> seen(n, std::numeric_limits<std::uint32_t>::max());
    for (std::uint32_t v = 0; v < n; ++v) {
        if (labels_[v] == kBiasToken) throw DataError("node uses the reserved bias token");
        for (std::uint32_t u : adjacency_[v]) {
            if (u >= n) {
                throw DataError("neighbor id " + std::to_string(u) + " of node " + std::to_string(v) +
                                " out of range (n=" + std::to_string(n) + ")");
            }
            if (seen[u] == v) {
                throw DataError("duplicate neighbor " + std::to_string(u) + " in adjacency of node " +
                                std::to_string(v));
            }
            seen[u] = v;
        }
        edge_count_ += adjacency_[v].size();
    }
}

void GraphDataset::validate() const {
    if (graphs.size() != classes.size() || graphs.size() != graph_ids.size()) {
        throw DataError("dataset has " + std::to_string(graphs.size()) + " graphs, " +
                        std::to_string(classes.size()) + " classes and " +
                        std::to_string(graph_ids.size()) + " ids");
    }
    for (const auto& g : graphs) {
        for (LabelId l : g.labels()) {
            if (l >= alphabet.size()) throw DataError("graph label outside the dataset alphabet");
        }
    }
}

Graph shuffle_neighborhoods(const Graph& graph, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto adjacency = graph.adjacency();
    for (auto& list : adjacency) std::shuffle(list.begin(), list.end(), rng);
    return Graph(std::vector<LabelId>(graph.labels().begin(), graph.labels().end()), std::move(adjacency),
                 graph.directed());
}

GraphDataset shuffle_neighborhoods(const GraphDataset& dataset, std::uint64_t seed) {
    GraphDataset out = dataset;
    for (std::size_t i = 0; i < out.graphs.size(); ++i)
        out.graphs[i] = shuffle_neighborhoods(dataset.graphs[i], hash_combine(seed, i));
    return out;
}

Graph symmetrize(const Graph& graph) {
    const std::size_t n = graph.node_count();
    auto adjacency = graph.adjacency();
    std::vector<std::unordered_set<std::uint32_t>> present(n);
    for (std::uint32_t v = 0; v < n; ++v) present[v].insert(adjacency[v].begin(), adjacency[v].end());
    for (std::uint32_t v = 0; v < n; ++v) {
        for (std::uint32_t u : graph.neighbors(v)) {
            if (present[u].insert(v).second) adjacency[u].push_back(v);
        }
    }
    return Graph(std::vector<LabelId>(graph.labels().begin(), graph.labels().end()), std::move(adjacency),
                 false);
}

Graph permute_nodes(const Graph& graph, std::span<const std::uint32_t> perm) {
    const std::size_t n = graph.node_count();
    if (perm.size() != n) throw ConfigError("permutation size does not match node count");
    std::vector<LabelId> labels(n);
    std::vector<std::vector<std::uint32_t>> adjacency(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        labels[perm[v]] = graph.label(v);
        auto& list = adjacency[perm[v]];
        for (std::uint32_t u : graph.neighbors(v)) list.push_back(perm[u]);
    }
    return Graph(std::move(labels), std::move(adjacency), graph.directed());
}

Graph disjoint_union(const Graph& a, const Graph& b) {
    std::vector<LabelId> labels(a.labels().begin(), a.labels().end());
    labels.insert(labels.end(), b.labels().begin(), b.labels().end());
    auto adjacency = a.adjacency();
    const auto shift = static_cast<std::uint32_t>(a.node_count());
    for (const auto& list : b.adjacency()) {
        auto& out = adjacency.emplace_back();
        for (std::uint32_t u : list) out.push_back(u + shift);
    }
    return Graph(std::move(labels), std::move(adjacency), a.directed() && b.directed());
}

}  // namespace kong
