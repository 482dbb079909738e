#pragma once

#include "kong/graph.hpp"

#include <cstdint>
#include <random>

namespace kong {

/// Shape of uniformly random directed graphs.
struct RandomGraphSpec {
    std::size_t min_nodes = 1;
    std::size_t max_nodes = 30;
    std::size_t max_edges = 100;
    std::size_t alphabet = 5;
    /// Average out-degree used to pick the edge count (capped by max_edges); 0 picks the edge
    /// count uniformly in [0, max_edges].
    double mean_degree = 0.0;
};

/// Random labels, random distinct non-loop edges, random neighbor order.
Graph random_graph(std::mt19937_64& rng, const RandomGraphSpec& spec);

/// `count` random graphs over the labels "0".."alphabet-1"; classes drawn from {0, 1}.
GraphDataset random_dataset(std::size_t count, const RandomGraphSpec& spec, std::uint64_t seed);

/// The eight-node example: A -> (B, C, D, G), B -> (E, F), C -> (H), D -> (G), neighbor
/// order alphabetical. Node 0 is A, node i carries the i-th letter.
GraphDataset eight_node_dataset();

}  // namespace kong
