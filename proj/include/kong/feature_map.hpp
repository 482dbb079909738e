#pragma once

#include "kong/graph.hpp"
#include "kong/kgram.hpp"
#include "kong/sketch.hpp"
#include "kong/traversal.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kong {

enum class FeatureMode { Exact, Sketched };

/// Everything that determines a graph feature map. Maps are comparable only when built from
/// equal configs.
struct FeatureConfig {
    TraversalKind traversal = TraversalKind::BFS;
    std::size_t h = 2;
    std::size_t k = 2;
    BaseKernel kernel{};
    FeatureMode mode = FeatureMode::Exact;
    std::size_t sketch_size = 1024;
    std::size_t rows = 5;
    std::uint64_t seed = 1;
    /// Apply one WL relabeling round to the dataset before traversal.
    bool relabel = false;
    /// Sketched cosine: normalize by the exact node-vector norm instead of the sketch estimate.
    bool exact_norm = false;
    /// Token cap of the explicit-string oracle.
    std::uint64_t string_cap = kDefaultStringCap;

    void validate() const;
    bool operator==(const FeatureConfig&) const = default;
};

/// Applies a preset in the "<kernel>[-rlb]-<p>" notation, e.g. "poly-rlb-1" or "cosine-2".
void apply_preset(FeatureConfig& config, std::string_view preset);

/// Explicit graph feature map: the sum over nodes of the node-string feature maps.
struct FeatureMap {
    FeatureConfig config;
    std::size_t graph_index = 0;
    /// Exact mode, p = 1: sum of node vectors, including the sqrt(c) bias coordinate.
    KGramVector sparse;
    /// Exact mode, p > 1: per-node vectors (unit norm or zero for cosine, no bias). Tensor
    /// coordinates are never materialized; kernels are evaluated pairwise.
    std::vector<KGramVector> node_vectors;
    /// Sketched mode: sum of the finalized per-node Tensor-Sketches.
    std::optional<CombinedSketch> sketch;

    /// Dense vector length for sketched maps (rows * buckets); 0 otherwise.
    std::size_t dense_dimension() const noexcept;
};

/// Applies the dataset-level preprocessing a config asks for (WL relabeling).
GraphDataset prepare_dataset(const GraphDataset& dataset, const FeatureConfig& config);

/// Feature map of one graph using its labels as given (relabeling is a dataset-level step,
/// see prepare_dataset).
FeatureMap graph_feature_map(const Graph& graph, const FeatureConfig& config, std::size_t graph_index = 0);

/// Prepares the dataset and computes every map on up to `threads` workers (0 = all cores).
std::vector<FeatureMap> dataset_feature_maps(const GraphDataset& dataset, const FeatureConfig& config,
                                             unsigned threads = 0);

/// Adds the finalized sketch of one node string to a graph sketch. Shared by the in-memory
/// and streaming paths so both produce bit-identical sums.
void accumulate_node_sketch(CombinedSketch& graph_sketch, const TensorSketch& node, const FeatureConfig& config,
                            std::optional<double> exact_norm = std::nullopt);

/// Kernel between two maps of the same config: dot product (exact p = 1), median-of-rows
/// sketch estimate (sketched), or the pairwise node sum (exact p > 1).
double kernel_value(const FeatureMap& a, const FeatureMap& b);

struct GramMatrix {
    std::size_t n = 0;
    std::vector<double> values;  ///< row-major n x n

    double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

GramMatrix gram_matrix(std::span<const FeatureMap> maps);
GramMatrix gram_matrix(const GraphDataset& dataset, const FeatureConfig& config, unsigned threads = 0);

/// O(n_G n_H) oracle: sum over node pairs of the exact base kernel on k-gram vectors counted
/// from explicit node strings.
double exact_pairwise_kernel(const Graph& g, const Graph& h, const FeatureConfig& config);

/// Additive error bound eps * (K + R^{2p} alpha T) for a kernel value K with T node pairs
/// whose powered cosine is below alpha.
double error_bound(const SketchBudget& budget, double kernel_value, double pairs_below_alpha);

}  // namespace kong
