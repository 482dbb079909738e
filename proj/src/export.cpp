#include "kong/export.hpp"

#include <array>
#include <charconv>
#include <ostream>

namespace kong {

std::string format_number(double value) {
    std::array<char, 64> buffer{};
    auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    if (ec != std::errc{}) throw Error("cannot format number");
    return std::string(buffer.data(), ptr);
}

FeatureVocabulary FeatureVocabulary::build(std::span<const FeatureMap> maps) {
    FeatureVocabulary vocabulary;
    for (const auto& map : maps)
        for (const auto& [gram, value] : map.sparse.entries()) vocabulary.index_.emplace(gram, 0);
    for (auto& [gram, index] : vocabulary.index_) {
        index = vocabulary.grams_.size();
        vocabulary.grams_.push_back(gram);
    }
    return vocabulary;
}

void FeatureVocabulary::write(std::ostream& out, const LabelAlphabet& alphabet) const {
    for (std::size_t i = 0; i < grams_.size(); ++i) {
        out << i << '\t';
        for (std::size_t t = 0; t < grams_[i].size(); ++t) {
            if (t > 0) out << ' ';
            const LabelId token = grams_[i][t];
            out << (token == kBiasToken ? std::string("<bias>") : alphabet.name(token));
        }
        out << '\n';
    }
}

std::vector<SparseRow> feature_rows(std::span<const FeatureMap> maps, std::size_t* dimension) {
    std::vector<SparseRow> rows(maps.size());
    if (maps.empty()) {
        if (dimension) *dimension = 0;
        return rows;
    }
    for (const auto& map : maps) {
        if (!(map.config == maps.front().config)) throw ConfigError("feature maps come from different configurations");
    }
    const FeatureConfig& config = maps.front().config;
    if (config.mode == FeatureMode::Sketched) {
        for (std::size_t i = 0; i < maps.size(); ++i) {
            const auto values = maps[i].sketch->values();
            for (std::size_t j = 0; j < values.size(); ++j)
                if (values[j] != 0.0) rows[i].emplace_back(j, values[j]);
        }
        if (dimension) *dimension = maps.front().dense_dimension();
        return rows;
    }
    if (config.kernel.p != 1) {
        throw ConfigError("exact maps with p > 1 have no explicit coordinates; use --mode sketched");
    }
    const auto vocabulary = FeatureVocabulary::build(maps);
    for (std::size_t i = 0; i < maps.size(); ++i)
        for (const auto& [gram, value] : maps[i].sparse.entries()) rows[i].emplace_back(vocabulary.index(gram), value);
    if (dimension) *dimension = vocabulary.size();
    return rows;
}

void write_sparse_features(std::ostream& out, std::span<const FeatureMap> maps, std::span<const int> classes) {
    if (classes.size() != maps.size()) throw DataError("class count does not match feature map count");
    const auto rows = feature_rows(maps);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << classes[i];
        for (const auto& [column, value] : rows[i]) out << ' ' << column << ':' << format_number(value);
        out << '\n';
    }
}

void write_dense_features(std::ostream& out, std::span<const FeatureMap> maps, std::span<const int> classes) {
    if (classes.size() != maps.size()) throw DataError("class count does not match feature map count");
    std::size_t dimension = 0;
    const auto rows = feature_rows(maps, &dimension);
    out << "class";
    for (std::size_t j = 0; j < dimension; ++j) out << ",f" << j;
    out << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << classes[i];
        std::size_t next = 0;
        for (std::size_t j = 0; j < dimension; ++j) {
            out << ',';
            if (next < rows[i].size() && rows[i][next].first == j) {
                out << format_number(rows[i][next].second);
                ++next;
            } else {
                out << '0';
            }
        }
        out << '\n';
    }
}

void write_gram_csv(std::ostream& out, const GramMatrix& gram, std::span<const std::int64_t> graph_ids) {
    if (graph_ids.size() != gram.n) throw DataError("graph id count does not match the Gram matrix");
    out << "graph";
    for (auto id : graph_ids) out << ',' << id;
    out << '\n';
    for (std::size_t i = 0; i < gram.n; ++i) {
        out << graph_ids[i];
        for (std::size_t j = 0; j < gram.n; ++j) out << ',' << format_number(gram(i, j));
        out << '\n';
    }
}

}  // namespace kong
