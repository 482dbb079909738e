#pragma once

#include "kong/graph.hpp"
#include "kong/kgram.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace kong {

/// Composite string generation traversals.
///  BFS: s_v^i = concat of s_u^{i-1} over ordered neighbors; S_v^h = s_v^0 s_v^1 ... s_v^h.
///  WL:  s_v^i = l(v) followed by concat of s_u^{i-1}; S_v^h = s_v^h.
/// BFS is a tree unfolding: a node reachable along two walks contributes its label twice.
enum class TraversalKind { BFS, WL };

TraversalKind parse_traversal_kind(std::string_view name);
std::string_view to_string(TraversalKind kind);

/// Explicit strings of every node at every iteration.
struct NodeStrings {
    /// iterations[i][v] = s_v^i, for i = 0..h.
    std::vector<std::vector<TokenString>> iterations;
    /// final_strings[v] = S_v^h.
    std::vector<TokenString> final_strings;
};

/// Default cap on the total number of tokens the explicit oracle may materialize.
inline constexpr std::uint64_t kDefaultStringCap = 10'000'000;

/// Explicit (oracle) traversal. Throws StringLengthExceeded once the strings held for one
/// graph would exceed `cap` tokens in total.
NodeStrings bfs_strings(const Graph& graph, std::size_t h, std::uint64_t cap = kDefaultStringCap);
NodeStrings wl_strings(const Graph& graph, std::size_t h, std::uint64_t cap = kDefaultStringCap);
NodeStrings traversal_strings(const Graph& graph, TraversalKind kind, std::size_t h,
                              std::uint64_t cap = kDefaultStringCap);

/// One WL relabeling round: every node gets a new id for its string l(v) + ordered neighbor
/// labels. Equal strings share an id; ids follow the lexicographic order of the strings, so
/// the result does not depend on graph or node order.
Graph wl_relabel(const Graph& graph);

/// Dataset-wide relabeling with a shared dictionary; the new alphabet names each label by
/// its old labels, e.g. "A(B,C)".
GraphDataset wl_relabel(const GraphDataset& dataset);

/// One CSGT iteration over arbitrary per-node states. `combine` maps the ordered child states
/// (the node's own initial state first for WL, then its neighbors' previous states) to the
/// new state of the node.
template <class State, class Combine>
std::vector<State> csgt_step(std::span<const State> previous, std::span<const State> initial, const Graph& graph,
                             TraversalKind kind, Combine&& combine) {
    const std::size_t n = graph.node_count();
    std::vector<State> next;
    next.reserve(n);
    std::vector<const State*> children;
    for (std::uint32_t v = 0; v < n; ++v) {
        children.clear();
        if (kind == TraversalKind::WL) children.push_back(&initial[v]);
        for (std::uint32_t u : graph.neighbors(v)) children.push_back(&previous[u]);
        next.push_back(combine(v, std::span<const State* const>(children)));
    }
    return next;
}

/// Junction k-gram accounting of one traversal run.
struct CsgtStats {
    /// Junction k-grams created per iteration by the neighbor concatenations.
    std::vector<std::size_t> step_kgrams;
    /// Junction k-grams created per iteration when BFS appends s_v^i to S_v.
    std::vector<std::size_t> accumulate_kgrams;
    /// Largest per-node junction count of each iteration minus its bound: (k-1)(|N_v|-1) for
    /// BFS, (k-1)|N_v| for WL. Non-positive when the bound holds.
    std::vector<std::ptrdiff_t> worst_node_excess;
    /// Boundary tokens stored for the s^i summaries of each iteration.
    std::vector<std::size_t> stored_tokens;
};

/// Runs h iterations of the incremental traversal on k-gram summaries and returns the
/// summary of S_v^h for every node. Never materializes node strings.
template <KGramPayload P>
std::vector<StringSummary<P>> run_csgt_summaries(const Graph& graph, TraversalKind kind, std::size_t h,
                                                 std::size_t k, const P& zero, CsgtStats* stats = nullptr) {
    using Summary = StringSummary<P>;
    const std::size_t n = graph.node_count();
    std::vector<Summary> initial;
    initial.reserve(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        const LabelId label = graph.label(v);
        initial.push_back(summarize<P>(std::span<const LabelId>(&label, 1), k, zero));
    }

    std::vector<Summary> current = initial;
    std::vector<Summary> totals;
    if (kind == TraversalKind::BFS) totals = initial;

    for (std::size_t i = 1; i <= h; ++i) {
        std::size_t step_new = 0;
        std::ptrdiff_t worst = std::numeric_limits<std::ptrdiff_t>::min();
        auto combine = [&](std::uint32_t v, std::span<const Summary* const> children) {
            std::size_t created = 0;
            Summary s = concat_summaries<P>(children, k, zero, &created);
            step_new += created;
            // BFS joins |N_v| strings; WL additionally joins the node's own label in front.
            const std::size_t degree = graph.neighbors(v).size();
            const std::size_t junctions = kind == TraversalKind::BFS && degree > 0 ? degree - 1 : degree;
            const auto bound = static_cast<std::ptrdiff_t>((k - 1) * junctions);
            worst = std::max(worst, static_cast<std::ptrdiff_t>(created) - bound);
            return s;
        };
        current = csgt_step<Summary>(current, initial, graph, kind, combine);

        std::size_t acc_new = 0;
        if (kind == TraversalKind::BFS) {
            for (std::uint32_t v = 0; v < n; ++v) {
                const Summary* parts[] = {&totals[v], &current[v]};
                std::size_t created = 0;
                totals[v] = concat_summaries<P>(std::span<const Summary* const>(parts), k, zero, &created);
                acc_new += created;
            }
        }
        if (stats) {
            std::size_t tokens = 0;
            for (const auto& s : current) tokens += s.boundary.stored_tokens();
            stats->step_kgrams.push_back(step_new);
            stats->accumulate_kgrams.push_back(acc_new);
            stats->worst_node_excess.push_back(n == 0 ? 0 : worst);
            stats->stored_tokens.push_back(tokens);
        }
    }
    return kind == TraversalKind::BFS ? totals : current;
}

}  // namespace kong
