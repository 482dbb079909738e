#include "kong/synthetic.hpp"
#include "kong/traversal.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace kong;

namespace {

std::string spell(const GraphDataset& ds, const TokenString& s) {
    std::string out;
    for (auto t : s) out += ds.alphabet.name(t);
    return out;
}

}  // namespace

TEST_SUITE("traversal") {

TEST_CASE("example graph strings") {
    const auto ds = eight_node_dataset();
    const Graph& g = ds.graphs[0];

    const auto bfs = bfs_strings(g, 2);
    CHECK(spell(ds, bfs.final_strings[0]) == "ABCDGEFHG");
    CHECK(spell(ds, bfs.iterations[1][0]) == "BCDG");
    CHECK(spell(ds, bfs.iterations[2][0]) == "EFHG");

    const auto wl = wl_strings(g, 2);
    CHECK(spell(ds, wl.iterations[0][0]) == "A");
    CHECK(spell(ds, wl.iterations[1][1]) == "BEF");
    CHECK(spell(ds, wl.iterations[1][2]) == "CH");
    CHECK(spell(ds, wl.iterations[1][3]) == "DG");
    CHECK(spell(ds, wl.iterations[1][6]) == "G");
    CHECK(spell(ds, wl.final_strings[0]) == "ABEFCHDGG");
    // The recurrence gives the root's first WL string as the label plus all four neighbors.
    CHECK(spell(ds, wl.iterations[1][0]) == "ABCDG");
}

TEST_CASE("explicit strings match the recursive definition") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const Graph g = random_graph(rng, {.max_nodes = 10, .max_edges = 25, .alphabet = 4});
        for (auto kind : {TraversalKind::BFS, TraversalKind::WL}) {
            for (std::size_t h = 0; h <= 3; ++h) {
                const auto strings = traversal_strings(g, kind, h);
                for (std::uint32_t v = 0; v < g.node_count(); ++v) {
                    CHECK(strings.final_strings[v] == oracle::final_string(g, kind, v, h));
                    for (std::size_t i = 0; i <= h; ++i)
                        CHECK(strings.iterations[i][v] == oracle::node_string(g, kind, v, i));
                }
            }
        }
    }
}

TEST_CASE("string cap is enforced") {
    // Complete digraph: strings grow as (n-1)^h.
    std::vector<std::vector<std::uint32_t>> adjacency(6);
    for (std::uint32_t v = 0; v < 6; ++v)
        for (std::uint32_t u = 0; u < 6; ++u)
            if (u != v) adjacency[v].push_back(u);
    const Graph g(std::vector<LabelId>(6, 0), adjacency);
    CHECK_THROWS_AS(bfs_strings(g, 6, 1000), StringLengthExceeded);
    CHECK_NOTHROW(bfs_strings(g, 2, 1000));
}

TEST_CASE("traversal kind names") {
    CHECK(parse_traversal_kind("bfs") == TraversalKind::BFS);
    CHECK(parse_traversal_kind("wl") == TraversalKind::WL);
    CHECK(to_string(TraversalKind::WL) == "wl");
    CHECK_THROWS_AS(parse_traversal_kind("dfs"), ConfigError);
}

TEST_CASE("WL relabeling gives equal ids exactly to equal label-neighborhood strings") {
    const auto ds = random_dataset(15, {.max_nodes = 8, .max_edges = 14, .alphabet = 3}, 4);
    const auto relabeled = wl_relabel(ds);
    std::map<oracle::Tokens, LabelId> seen;
    std::map<LabelId, oracle::Tokens> back;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const Graph& g = ds.graphs[i];
        const Graph& r = relabeled.graphs[i];
        CHECK(r.adjacency() == g.adjacency());
        for (std::uint32_t v = 0; v < g.node_count(); ++v) {
            const auto s = oracle::node_string(g, TraversalKind::WL, v, 1);
            auto [it, inserted] = seen.emplace(s, r.label(v));
            CHECK(it->second == r.label(v));
            auto [jt, fresh] = back.emplace(r.label(v), s);
            CHECK(jt->second == s);
        }
    }
    CHECK(relabeled.alphabet.size() == seen.size());
}

TEST_CASE("WL relabel names new labels after their neighborhoods") {
    const auto ds = eight_node_dataset();
    const auto r = wl_relabel(ds);
    CHECK(r.alphabet.name(r.graphs[0].label(0)) == "A(B,C,D,G)");
    CHECK(r.alphabet.name(r.graphs[0].label(4)) == "E()");
}

}  // TEST_SUITE
