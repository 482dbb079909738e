#include "kong/dataset_io.hpp"
#include "kong/graph.hpp"
#include "kong/synthetic.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>

using namespace kong;

TEST_SUITE("graph") {

TEST_CASE("canonical alphabet orders integers numerically before other labels") {
    const auto alphabet = LabelAlphabet::canonical({"b", "10", "2", "a", "2", "-1"});
    REQUIRE(alphabet.size() == 5);
    CHECK(alphabet.name(0) == "-1");
    CHECK(alphabet.name(1) == "2");
    CHECK(alphabet.name(2) == "10");
    CHECK(alphabet.name(3) == "a");
    CHECK(alphabet.name(4) == "b");
    CHECK(alphabet.find("10") == LabelId{2});
    CHECK_FALSE(alphabet.find("c").has_value());
}

TEST_CASE("graph construction validates adjacency") {
    CHECK_THROWS_AS(Graph({0, 1}, {{1}}), DataError);
    CHECK_THROWS_AS(Graph({0, 1}, {{2}, {}}), DataError);
    CHECK_THROWS_AS(Graph({0, 1}, {{1, 1}, {}}), DataError);
    CHECK_THROWS_AS(Graph({kBiasToken}, {{}}), DataError);
    const Graph g({0, 1, 2}, {{2, 1}, {0}, {}});
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 3);
    CHECK(g.neighbors(0)[0] == 2);
}

TEST_CASE("shuffle keeps labels, edge count and neighbor multisets") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const Graph g = random_graph(rng, {});
        const Graph s = shuffle_neighborhoods(g, static_cast<std::uint64_t>(trial));
        REQUIRE(s.node_count() == g.node_count());
        CHECK(s.edge_count() == g.edge_count());
        CHECK(std::equal(s.labels().begin(), s.labels().end(), g.labels().begin()));
        for (std::uint32_t v = 0; v < g.node_count(); ++v) {
            auto a = std::vector<std::uint32_t>(g.neighbors(v).begin(), g.neighbors(v).end());
            auto b = std::vector<std::uint32_t>(s.neighbors(v).begin(), s.neighbors(v).end());
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            CHECK(a == b);
        }
        CHECK(shuffle_neighborhoods(g, 99) == shuffle_neighborhoods(g, 99));
    }
}

TEST_CASE("shuffle leaves lists of length at most one unchanged") {
    const Graph g({0, 1, 2, 3}, {{1}, {2}, {3}, {}});
    CHECK(shuffle_neighborhoods(g, 17) == g);
}

TEST_CASE("symmetrize appends missing reverse edges") {
    const Graph g({0, 1, 2}, {{1, 2}, {0}, {}});
    const Graph s = symmetrize(g);
    CHECK(s.edge_count() == 4);
    CHECK(std::vector<std::uint32_t>(s.neighbors(2).begin(), s.neighbors(2).end()) == std::vector<std::uint32_t>{0});
    CHECK(std::vector<std::uint32_t>(s.neighbors(1).begin(), s.neighbors(1).end()) == std::vector<std::uint32_t>{0});
}

TEST_CASE("benchmark parser builds hand-written adjacency") {
    test::TempDir dir;
    test::write_file(dir.path() / "TOY_A.txt", "1, 2\n1, 3\n2, 1\n4, 5\n\n");
    test::write_file(dir.path() / "TOY_graph_indicator.txt", "1\n1\n1\n2\n2\n");
    test::write_file(dir.path() / "TOY_graph_labels.txt", "1\n-1\n");
    test::write_file(dir.path() / "TOY_node_labels.txt", "3\n0\n3\n1\n0\n");
    const auto ds = parse_benchmark_dataset(dir.path());
    REQUIRE(ds.size() == 2);
    CHECK(ds.classes == std::vector<int>{1, -1});
    CHECK(ds.graph_ids == std::vector<std::int64_t>{1, 2});
    // Canonical alphabet: 0 -> id 0, 1 -> id 1, 3 -> id 2.
    CHECK(ds.graphs[0] == Graph({2, 0, 2}, {{1, 2}, {0}, {}}));
    CHECK(ds.graphs[1] == Graph({1, 0}, {{1}, {}}));

    SUBCASE("edge order file reorders neighbors") {
        test::write_file(dir.path() / "TOY_edge_order.txt", "5\n2\n0\n0\n");
        const auto ordered = parse_benchmark_dataset(dir.path());
        CHECK(ordered.graphs[0] == Graph({2, 0, 2}, {{2, 1}, {0}, {}}));
    }
    SUBCASE("undirected option adds reverse edges") {
        const auto und = parse_benchmark_dataset(dir.path(), {.undirected = true});
        CHECK(und.graphs[0].edge_count() == 4);
        CHECK(und.graphs[1].edge_count() == 2);
    }
}

TEST_CASE("benchmark parser handles a single isolated node") {
    test::TempDir dir;
    test::write_file(dir.path() / "ONE_A.txt", "");
    test::write_file(dir.path() / "ONE_graph_indicator.txt", "1\n");
    test::write_file(dir.path() / "ONE_graph_labels.txt", "0\n");
    test::write_file(dir.path() / "ONE_node_labels.txt", "7\n");
    const auto ds = parse_benchmark_dataset(dir.path());
    REQUIRE(ds.size() == 1);
    CHECK(ds.graphs[0].node_count() == 1);
    CHECK(ds.graphs[0].edge_count() == 0);
}

TEST_CASE("benchmark parser reports file and line") {
    test::TempDir dir;
    test::write_file(dir.path() / "BAD_graph_indicator.txt", "1\n1\n");
    test::write_file(dir.path() / "BAD_graph_labels.txt", "0\n");
    test::write_file(dir.path() / "BAD_node_labels.txt", "1\n1\n");

    SUBCASE("missing mandatory file") {
        CHECK_THROWS_AS(parse_benchmark_dataset(dir.path()), ParseError);
    }
    SUBCASE("node index out of range") {
        test::write_file(dir.path() / "BAD_A.txt", "1, 2\n2, 3\n");
        try {
            parse_benchmark_dataset(dir.path());
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
            CHECK(e.file().ends_with("BAD_A.txt"));
        }
    }
    SUBCASE("indicator and label files disagree") {
        test::write_file(dir.path() / "BAD_A.txt", "1, 2\n");
        test::write_file(dir.path() / "BAD_node_labels.txt", "1\n1\n1\n");
        try {
            parse_benchmark_dataset(dir.path());
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
            CHECK(e.file().ends_with("BAD_node_labels.txt"));
        }
    }
    SUBCASE("indicator names a graph without a class") {
        test::write_file(dir.path() / "BAD_A.txt", "1, 2\n");
        test::write_file(dir.path() / "BAD_graph_indicator.txt", "1\n2\n");
        try {
            parse_benchmark_dataset(dir.path());
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
            CHECK(e.file().ends_with("BAD_graph_indicator.txt"));
        }
    }
}

TEST_CASE("temporal edge list sorts by order key with label tie-break") {
    test::TempDir dir;
    const TemporalFiles files{dir.path() / "e.csv", dir.path() / "l.csv", {}};

    SUBCASE("ascending order key") {
        test::write_file(files.labels, "0,0,A\n0,1,B\n0,2,C\n");
        test::write_file(files.edges, "0,0,1,3\n0,0,2,1\n");
        const auto ds = parse_temporal_edge_list(files);
        CHECK(std::vector<std::uint32_t>(ds.graphs[0].neighbors(0).begin(), ds.graphs[0].neighbors(0).end()) ==
              std::vector<std::uint32_t>{2, 1});
    }
    SUBCASE("equal keys put the smaller label first") {
        test::write_file(files.labels, "0,0,Z\n0,1,Y\n0,2,X\n");
        test::write_file(files.edges, "0,0,1,4\n0,0,2,4\n");
        const auto ds = parse_temporal_edge_list(files);
        CHECK(std::vector<std::uint32_t>(ds.graphs[0].neighbors(0).begin(), ds.graphs[0].neighbors(0).end()) ==
              std::vector<std::uint32_t>{2, 1});
    }
    SUBCASE("alphabetical keys reproduce the example neighbor order") {
        test::write_file(files.labels, "0,0,A\n0,1,B\n0,2,C\n0,3,D\n0,6,G\n");
        test::write_file(files.edges, "0,0,6,7\n0,0,3,4\n0,0,1,2\n0,0,2,3\n");
        const auto ds = parse_temporal_edge_list(files);
        const auto& g = ds.graphs[0];
        std::string order;
        for (auto u : g.neighbors(0)) order += ds.alphabet.name(g.label(u));
        CHECK(order == "BCDG");
    }
    SUBCASE("errors") {
        test::write_file(files.labels, "0,0,A\n0,1,B\n");
        test::write_file(files.edges, "0,0,1,1\n0,0,5,2\n");
        CHECK_THROWS_AS(parse_temporal_edge_list(files), ParseError);
        test::write_file(files.edges, "0,0,1,1\n0,0,1,2\n");
        CHECK_THROWS_AS(parse_temporal_edge_list(files), ParseError);
        test::write_file(files.edges, "0,0,1\n");
        CHECK_THROWS_AS(parse_temporal_edge_list(files), ParseError);
    }
    SUBCASE("trailing whitespace and blank lines are ignored") {
        test::write_file(files.labels, "0,0,A  \n\n0,1,B\t\n");
        test::write_file(files.edges, "\n0,0,1,1   \n\n");
        const auto ds = parse_temporal_edge_list(files);
        CHECK(ds.graphs[0] == Graph({0, 1}, {{1}, {}}));
    }
}

TEST_CASE("temporal round trip reproduces the dataset") {
    const auto original = random_dataset(25, {.max_nodes = 12, .max_edges = 30, .alphabet = 4}, 3);
    test::TempDir dir;
    const TemporalFiles files{dir.path() / "e.csv", dir.path() / "l.csv", dir.path() / "c.csv"};
    write_temporal_edge_list(original, files);
    const auto parsed = parse_temporal_edge_list(files);
    CHECK(parsed.graphs == original.graphs);
    CHECK(parsed.classes == original.classes);
    CHECK(parsed.graph_ids == original.graph_ids);
    CHECK(parsed.alphabet == original.alphabet);
}

TEST_CASE("benchmark round trip reproduces the dataset") {
    const auto original = random_dataset(10, {.max_nodes = 8, .max_edges = 20, .alphabet = 3}, 8);
    test::TempDir dir;
    write_benchmark_dataset(original, dir.path(), "RT");
    const auto parsed = parse_benchmark_dataset(dir.path());
    REQUIRE(parsed.alphabet == original.alphabet);
    CHECK(parsed.graphs == original.graphs);
    CHECK(parsed.classes == original.classes);
    CHECK(parsed.graph_ids.front() == 1);
}

}  // TEST_SUITE
