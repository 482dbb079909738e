#pragma once

#include "kong/feature_map.hpp"

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kong {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Column index of every k-gram used by a set of exact maps, in lexicographic k-gram order.
class FeatureVocabulary {
public:
    static FeatureVocabulary build(std::span<const FeatureMap> maps);

    std::size_t size() const noexcept { return grams_.size(); }
    std::size_t index(const KGram& gram) const { return index_.at(gram); }
    const KGram& gram(std::size_t i) const { return grams_[i]; }

    /// "index<TAB>token token ..." per line; the bias coordinate is written as "<bias>".
    void write(std::ostream& out, const LabelAlphabet& alphabet) const;

private:
    std::vector<KGram> grams_;
    std::map<KGram, std::size_t> index_;
};

/// Sparse feature row: (column, value) pairs with ascending columns, zeros omitted.
using SparseRow = std::vector<std::pair<std::size_t, double>>;

/// Rows for sketched maps (columns 0..rows*buckets-1) or exact p = 1 maps (columns from the
/// vocabulary). Exact maps of degree p > 1 have no explicit coordinates and are rejected.
std::vector<SparseRow> feature_rows(std::span<const FeatureMap> maps, std::size_t* dimension = nullptr);

/// One graph per line: "class idx:value idx:value ...".
void write_sparse_features(std::ostream& out, std::span<const FeatureMap> maps, std::span<const int> classes);

/// Header "class,f0,f1,...", then one row per graph.
void write_dense_features(std::ostream& out, std::span<const FeatureMap> maps, std::span<const int> classes);

/// Header "graph,<id>,<id>,...", then one row per graph starting with its id.
void write_gram_csv(std::ostream& out, const GramMatrix& gram, std::span<const std::int64_t> graph_ids);

}  // namespace kong
