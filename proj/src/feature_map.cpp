#include "kong/feature_map.hpp"

#include "kong/fft.hpp"
#include "kong/parallel.hpp"

#include <cmath>
#include <string>

namespace kong {

namespace {

/// Sketch plus exact vector, for sketched cosine maps normalized by exact norms.
struct SketchWithExact {
    TensorSketch sketch;
    KGramVector exact;

    void add(const SketchWithExact& other) {
        sketch.add(other.sketch);
        exact.add(other.exact);
    }
    void update(std::span<const LabelId> gram, double weight) {
        sketch.update(gram, weight);
        exact.update(gram, weight);
    }
};

TensorSketch empty_sketch(const FeatureConfig& config) {
    return TensorSketch(config.seed, config.sketch_size, config.rows, static_cast<std::size_t>(config.kernel.p));
}

/// Node feature vector for the exact path: normalized for cosine, bias appended for c > 0
/// when p = 1.
KGramVector finish_exact_node(KGramVector phi, const FeatureConfig& config, bool with_bias) {
    if (config.kernel.kind == KernelKind::Cosine) {
        const double norm = phi.norm();
        if (norm > 0.0) phi.scale(1.0 / norm);
    }
    if (with_bias && config.kernel.c > 0.0) {
        const LabelId bias = kBiasToken;
        phi.update(std::span<const LabelId>(&bias, 1), std::sqrt(config.kernel.c));
    }
    return phi;
}

double pairwise_sum(std::span<const KGramVector> a, std::span<const KGramVector> b, const BaseKernel& kernel) {
    double total = 0.0;
    for (const auto& x : a) {
        for (const auto& y : b) {
            // Vectors are already unit-norm (or zero) for cosine.
            total += std::pow(x.dot(y) + kernel.c, kernel.p);
        }
    }
    return total;
}

}  // namespace

void FeatureConfig::validate() const {
    kernel.validate();
    if (k == 0) throw ConfigError("k must be at least 1");
    if (mode == FeatureMode::Sketched) {
        if (!is_power_of_two(sketch_size)) throw ConfigError("sketch size must be a power of two");
        if (rows == 0) throw ConfigError("sketch rows must be at least 1");
    }
    if (exact_norm && (mode != FeatureMode::Sketched || kernel.kind != KernelKind::Cosine))
        throw ConfigError("exact norms apply to sketched cosine maps only");
}

void apply_preset(FeatureConfig& config, std::string_view preset) {
    const std::string text(preset);
    const auto dash = text.find('-');
    if (dash == std::string::npos) throw ConfigError("preset '" + text + "' should look like poly-rlb-1");
    const std::string kernel = text.substr(0, dash);
    std::string rest = text.substr(dash + 1);
    bool relabel = false;
    if (rest.starts_with("rlb-")) {
        relabel = true;
        rest = rest.substr(4);
    }
    int p = 0;
    try {
        std::size_t used = 0;
        p = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument(rest);
    } catch (const std::exception&) {
        throw ConfigError("preset '" + text + "' has no valid degree");
    }
    if (kernel == "poly") {
        config.kernel.kind = KernelKind::Poly;
    } else if (kernel == "cosine") {
        config.kernel.kind = KernelKind::Cosine;
        config.kernel.c = 0.0;
    } else {
        throw ConfigError("preset kernel must be poly or cosine, got '" + kernel + "'");
    }
    config.kernel.p = p;
    config.relabel = relabel;
    config.validate();
}

std::size_t FeatureMap::dense_dimension() const noexcept { return sketch ? sketch->values().size() : 0; }

GraphDataset prepare_dataset(const GraphDataset& dataset, const FeatureConfig& config) {
    return config.relabel ? wl_relabel(dataset) : dataset;
}

void accumulate_node_sketch(CombinedSketch& graph_sketch, const TensorSketch& node, const FeatureConfig& config,
                            std::optional<double> exact_norm) {
    if (config.kernel.kind == KernelKind::Cosine) {
        const double norm = exact_norm ? *exact_norm : node.component(0).norm();
        if (norm <= 0.0) return;
        CombinedSketch combined = node.finalize();
        combined.scale(1.0 / std::pow(norm, config.kernel.p));
        graph_sketch.add(combined);
        return;
    }
    if (config.kernel.c > 0.0) {
        TensorSketch biased = node;
        const LabelId bias = kBiasToken;
        biased.update(std::span<const LabelId>(&bias, 1), std::sqrt(config.kernel.c));
        graph_sketch.add(biased.finalize());
        return;
    }
    graph_sketch.add(node.finalize());
}

FeatureMap graph_feature_map(const Graph& graph, const FeatureConfig& config, std::size_t graph_index) {
    config.validate();
    FeatureMap out;
    out.config = config;
    out.graph_index = graph_index;

    if (config.mode == FeatureMode::Exact) {
        const auto summaries = run_csgt_summaries<KGramVector>(graph, config.traversal, config.h, config.k, {});
        const bool materialized = config.kernel.p == 1;
        for (const auto& s : summaries) {
            KGramVector phi = finish_exact_node(s.payload, config, materialized);
            if (materialized) {
                out.sparse.add(phi);
            } else {
                out.node_vectors.push_back(std::move(phi));
            }
        }
        return out;
    }

    CombinedSketch total(config.seed, config.sketch_size, config.rows, static_cast<std::size_t>(config.kernel.p));
    if (config.exact_norm) {
        const SketchWithExact zero{empty_sketch(config), {}};
        const auto summaries = run_csgt_summaries<SketchWithExact>(graph, config.traversal, config.h, config.k, zero);
        for (const auto& s : summaries) accumulate_node_sketch(total, s.payload.sketch, config, s.payload.exact.norm());
    } else {
        const auto summaries =
            run_csgt_summaries<TensorSketch>(graph, config.traversal, config.h, config.k, empty_sketch(config));
        for (const auto& s : summaries) accumulate_node_sketch(total, s.payload, config);
    }
    out.sketch = std::move(total);
    return out;
}

std::vector<FeatureMap> dataset_feature_maps(const GraphDataset& dataset, const FeatureConfig& config,
                                             unsigned threads) {
    config.validate();
    const GraphDataset prepared = prepare_dataset(dataset, config);
    std::vector<FeatureMap> maps(prepared.size());
    parallel_for(prepared.size(), threads,
                 [&](std::size_t i) { maps[i] = graph_feature_map(prepared.graphs[i], config, i); });
    return maps;
}

double kernel_value(const FeatureMap& a, const FeatureMap& b) {
    if (!(a.config == b.config)) throw ConfigError("feature maps come from different configurations");
    if (a.sketch && b.sketch) return a.sketch->dot(*b.sketch);
    if (a.config.kernel.p == 1) return a.sparse.dot(b.sparse);
    return pairwise_sum(a.node_vectors, b.node_vectors, a.config.kernel);
}

GramMatrix gram_matrix(std::span<const FeatureMap> maps) {
    GramMatrix m;
    m.n = maps.size();
    m.values.assign(m.n * m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = i; j < m.n; ++j) {
            const double value = kernel_value(maps[i], maps[j]);
            m.values[i * m.n + j] = value;
            m.values[j * m.n + i] = value;
        }
    }
    return m;
}

GramMatrix gram_matrix(const GraphDataset& dataset, const FeatureConfig& config, unsigned threads) {
    const auto maps = dataset_feature_maps(dataset, config, threads);
    return gram_matrix(maps);
}

double exact_pairwise_kernel(const Graph& g, const Graph& h, const FeatureConfig& config) {
    config.kernel.validate();
    auto node_vectors = [&](const Graph& graph) {
        const NodeStrings strings = traversal_strings(graph, config.traversal, config.h, config.string_cap);
        std::vector<KGramVector> out;
        out.reserve(strings.final_strings.size());
        for (const auto& s : strings.final_strings) out.push_back(count_kgrams(s, config.k));
        return out;
    };
    const auto a = node_vectors(g);
    const auto b = node_vectors(h);
    double total = 0.0;
    for (const auto& x : a)
        for (const auto& y : b) total += exact_base_kernel(x, y, config.kernel);
    return total;
}

double error_bound(const SketchBudget& budget, double kernel_value, double pairs_below_alpha) {
    return budget.epsilon *
           (kernel_value + std::pow(budget.norm_bound, 2.0 * budget.degree) * budget.alpha * pairs_below_alpha);
}

}  // namespace kong
