#include "kong/traversal.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace kong {

namespace {

void charge(std::uint64_t& used, std::uint64_t tokens, std::uint64_t cap) {
    used = saturating_add(used, tokens);
    if (used > cap) {
        throw StringLengthExceeded("explicit node strings exceed the cap of " + std::to_string(cap) +
                                   " tokens; use the summary (sketched) path or lower h");
    }
}

/// Lengths of the next iteration's strings, computed before anything is allocated.
std::uint64_t next_total_length(const Graph& graph, const std::vector<TokenString>& previous, bool with_self) {
    std::uint64_t total = 0;
    for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
        if (with_self) total = saturating_add(total, 1);
        for (std::uint32_t u : graph.neighbors(v)) total = saturating_add(total, previous[u].size());
    }
    return total;
}

NodeStrings explicit_strings(const Graph& graph, std::size_t h, std::uint64_t cap, bool wl) {
    const std::size_t n = graph.node_count();
    NodeStrings out;
    std::uint64_t used = 0;

    auto& first = out.iterations.emplace_back(n);
    for (std::uint32_t v = 0; v < n; ++v) first[v] = {graph.label(v)};
    charge(used, n, cap);

    for (std::size_t i = 1; i <= h; ++i) {
        charge(used, next_total_length(graph, out.iterations.back(), wl), cap);
        std::vector<TokenString> next(n);
        const auto& previous = out.iterations.back();
        for (std::uint32_t v = 0; v < n; ++v) {
            if (wl) next[v].push_back(graph.label(v));
            for (std::uint32_t u : graph.neighbors(v))
                next[v].insert(next[v].end(), previous[u].begin(), previous[u].end());
        }
        out.iterations.push_back(std::move(next));
    }

    out.final_strings.resize(n);
    if (wl) {
        out.final_strings = out.iterations.back();
        return out;
    }
    std::uint64_t final_length = 0;
    for (const auto& iteration : out.iterations)
        for (const auto& s : iteration) final_length = saturating_add(final_length, s.size());
    charge(used, final_length, cap);
    for (std::uint32_t v = 0; v < n; ++v) {
        for (const auto& iteration : out.iterations)
            out.final_strings[v].insert(out.final_strings[v].end(), iteration[v].begin(), iteration[v].end());
    }
    return out;
}

TokenString one_hop_string(const Graph& graph, std::uint32_t v) {
    TokenString s{graph.label(v)};
    for (std::uint32_t u : graph.neighbors(v)) s.push_back(graph.label(u));
    return s;
}

}  // namespace

TraversalKind parse_traversal_kind(std::string_view name) {
    if (name == "bfs" || name == "BFS") return TraversalKind::BFS;
    if (name == "wl" || name == "WL") return TraversalKind::WL;
    throw ConfigError("unknown traversal '" + std::string(name) + "' (expected bfs or wl)");
}

std::string_view to_string(TraversalKind kind) { return kind == TraversalKind::BFS ? "bfs" : "wl"; }

NodeStrings bfs_strings(const Graph& graph, std::size_t h, std::uint64_t cap) {
    return explicit_strings(graph, h, cap, false);
}

NodeStrings wl_strings(const Graph& graph, std::size_t h, std::uint64_t cap) {
    return explicit_strings(graph, h, cap, true);
}

NodeStrings traversal_strings(const Graph& graph, TraversalKind kind, std::size_t h, std::uint64_t cap) {
    return explicit_strings(graph, h, cap, kind == TraversalKind::WL);
}

Graph wl_relabel(const Graph& graph) {
    std::map<TokenString, LabelId> dictionary;
    std::vector<TokenString> strings;
    for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
        strings.push_back(one_hop_string(graph, v));
        dictionary.emplace(strings.back(), 0);
    }
    LabelId next = 0;
    for (auto& entry : dictionary) entry.second = next++;
    std::vector<LabelId> labels;
    labels.reserve(strings.size());
    for (const auto& s : strings) labels.push_back(dictionary.at(s));
    return Graph(std::move(labels), graph.adjacency(), graph.directed());
}

GraphDataset wl_relabel(const GraphDataset& dataset) {
    dataset.validate();
    std::map<TokenString, LabelId> dictionary;
    std::vector<std::vector<TokenString>> strings(dataset.size());
    for (std::size_t g = 0; g < dataset.size(); ++g) {
        const Graph& graph = dataset.graphs[g];
        for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
            strings[g].push_back(one_hop_string(graph, v));
            dictionary.emplace(strings[g].back(), 0);
        }
    }

    GraphDataset out;
    out.classes = dataset.classes;
    out.graph_ids = dataset.graph_ids;
    for (auto& [s, id] : dictionary) {
        std::string name = dataset.alphabet.name(s.front()) + "(";
        for (std::size_t i = 1; i < s.size(); ++i) {
            if (i > 1) name += ',';
            name += dataset.alphabet.name(s[i]);
        }
        name += ')';
        const std::size_t before = out.alphabet.size();
        id = out.alphabet.intern(name);
        // Raw labels containing "(,)" can render two strings alike; keep the map a bijection.
        if (out.alphabet.size() == before) id = out.alphabet.intern(name + "#" + std::to_string(before));
    }

    for (std::size_t g = 0; g < dataset.size(); ++g) {
        const Graph& graph = dataset.graphs[g];
        std::vector<LabelId> labels;
        labels.reserve(graph.node_count());
        for (const auto& s : strings[g]) labels.push_back(dictionary.at(s));
        out.graphs.emplace_back(std::move(labels), graph.adjacency(), graph.directed());
    }
    return out;
}

}  // namespace kong
