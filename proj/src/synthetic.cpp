#include "kong/synthetic.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace kong {

Graph random_graph(std::mt19937_64& rng, const RandomGraphSpec& spec) {
    if (spec.min_nodes == 0 || spec.min_nodes > spec.max_nodes || spec.alphabet == 0)
        throw ConfigError("invalid random graph spec");
    const auto n = std::uniform_int_distribution<std::size_t>(spec.min_nodes, spec.max_nodes)(rng);
    const std::size_t possible = n * (n - 1);
    std::size_t m = 0;
    if (spec.mean_degree > 0.0) {
        m = static_cast<std::size_t>(spec.mean_degree * static_cast<double>(n));
    } else {
        m = std::uniform_int_distribution<std::size_t>(0, spec.max_edges)(rng);
    }
    m = std::min({m, spec.max_edges, possible});

    std::uniform_int_distribution<LabelId> label(0, static_cast<LabelId>(spec.alphabet - 1));
    std::vector<LabelId> labels(n);
    for (auto& l : labels) l = label(rng);

    std::vector<std::vector<std::uint32_t>> adjacency(n);
    std::uniform_int_distribution<std::uint32_t> node(0, static_cast<std::uint32_t>(n - 1));
    if (m * 2 > possible) {
        // Dense: sample by shuffling all candidate arcs.
        std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;
        for (std::uint32_t v = 0; v < n; ++v)
            for (std::uint32_t u = 0; u < n; ++u)
                if (u != v) arcs.emplace_back(v, u);
        std::shuffle(arcs.begin(), arcs.end(), rng);
        for (std::size_t e = 0; e < m; ++e) adjacency[arcs[e].first].push_back(arcs[e].second);
    } else {
        std::set<std::pair<std::uint32_t, std::uint32_t>> used;
        while (used.size() < m) {
            const auto v = node(rng);
            const auto u = node(rng);
            if (u != v && used.emplace(v, u).second) adjacency[v].push_back(u);
        }
    }
    for (auto& list : adjacency) std::shuffle(list.begin(), list.end(), rng);
    return Graph(std::move(labels), std::move(adjacency), true);
}

GraphDataset random_dataset(std::size_t count, const RandomGraphSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    GraphDataset dataset;
    std::vector<std::string> names;
    for (std::size_t a = 0; a < spec.alphabet; ++a) names.push_back(std::to_string(a));
    dataset.alphabet = LabelAlphabet::canonical(names);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < count; ++i) {
        dataset.graphs.push_back(random_graph(rng, spec));
        dataset.classes.push_back(coin(rng) ? 1 : 0);
        dataset.graph_ids.push_back(static_cast<std::int64_t>(i));
    }
    return dataset;
}

GraphDataset eight_node_dataset() {
    GraphDataset dataset;
    dataset.alphabet = LabelAlphabet::canonical({"A", "B", "C", "D", "E", "F", "G", "H"});
    std::vector<LabelId> labels{0, 1, 2, 3, 4, 5, 6, 7};
    std::vector<std::vector<std::uint32_t>> adjacency{{1, 2, 3, 6}, {4, 5}, {7}, {6}, {}, {}, {}, {}};
    dataset.graphs.emplace_back(std::move(labels), std::move(adjacency), true);
    dataset.classes.push_back(0);
    dataset.graph_ids.push_back(0);
    return dataset;
}

}  // namespace kong
