#include "kong/kgram.hpp"

#include <algorithm>
#include <cmath>

namespace kong {

KGramVector::KGramVector(std::initializer_list<std::pair<const KGram, double>> entries) {
    for (const auto& [gram, weight] : entries) update(gram, weight);
}

void KGramVector::update(std::span<const LabelId> gram, double weight) {
    if (weight == 0.0) return;
    auto it = entries_.find(gram);
    if (it == entries_.end()) {
        entries_.emplace(KGram(gram.begin(), gram.end()), weight);
        return;
    }
    it->second += weight;
    if (it->second == 0.0) entries_.erase(it);
}

void KGramVector::add(const KGramVector& other) {
    for (const auto& [gram, weight] : other.entries_) update(gram, weight);
}

void KGramVector::scale(double factor) {
    if (factor == 0.0) {
        entries_.clear();
        return;
    }
    for (auto& entry : entries_) entry.second *= factor;
}

double KGramVector::get(std::span<const LabelId> gram) const {
    auto it = entries_.find(gram);
    return it == entries_.end() ? 0.0 : it->second;
}

double KGramVector::dot(const KGramVector& other) const {
    const Map& small = size() <= other.size() ? entries_ : other.entries_;
    const Map& large = size() <= other.size() ? other.entries_ : entries_;
    double sum = 0.0;
    for (const auto& [gram, weight] : small) {
        auto it = large.find(gram);
        if (it != large.end()) sum += weight * it->second;
    }
    return sum;
}

double KGramVector::squared_norm() const {
    double sum = 0.0;
    for (const auto& entry : entries_) sum += entry.second * entry.second;
    return sum;
}

double KGramVector::norm() const { return std::sqrt(squared_norm()); }

KGramVector count_kgrams(std::span<const LabelId> tokens, std::size_t k) {
    if (k == 0) throw ConfigError("k must be at least 1");
    KGramVector out;
    for (std::size_t i = 0; i + k <= tokens.size(); ++i) out.update(tokens.subspan(i, k), 1.0);
    return out;
}

Boundary Boundary::of(std::span<const LabelId> tokens, std::size_t k) {
    if (k == 0) throw ConfigError("k must be at least 1");
    Boundary b(k);
    b.length_ = tokens.size();
    const std::size_t edge = k - 1;
    if (tokens.size() <= 2 * edge) {
        b.tokens_.assign(tokens.begin(), tokens.end());
    } else {
        b.tokens_.assign(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(edge));
        b.tokens_.insert(b.tokens_.end(), tokens.end() - static_cast<std::ptrdiff_t>(edge), tokens.end());
    }
    return b;
}

Boundary Boundary::restore(std::size_t k, std::uint64_t length, TokenString tokens) {
    if (k == 0) throw ConfigError("k must be at least 1");
    const std::size_t edge = k - 1;
    const std::uint64_t expected = length <= 2 * edge ? length : 2 * edge;
    if (tokens.size() != expected) throw DataError("boundary token count does not match its length");
    Boundary b(k);
    b.length_ = length;
    b.tokens_ = std::move(tokens);
    return b;
}

std::span<const LabelId> Boundary::prefix() const noexcept {
    const std::span<const LabelId> all(tokens_);
    return all.first(std::min(k_ - 1, all.size()));
}

std::span<const LabelId> Boundary::suffix() const noexcept {
    const std::span<const LabelId> all(tokens_);
    return all.last(std::min(k_ - 1, all.size()));
}

std::optional<std::span<const LabelId>> Boundary::short_body() const noexcept {
    if (length_ > 2 * (k_ - 1)) return std::nullopt;
    return std::span<const LabelId>(tokens_);
}

Boundary BoundaryBuilder::finish() const {
    Boundary b(k_);
    b.length_ = length_;
    if (length_ <= 2 * (k_ - 1)) {
        b.tokens_ = body_;
    } else {
        b.tokens_ = head_;
        b.tokens_.insert(b.tokens_.end(), tail_.begin(), tail_.end());
    }
    return b;
}

std::size_t new_kgram_count(std::span<const Boundary> children, std::size_t k) {
    if (k == 0) throw ConfigError("k must be at least 1");
    BoundaryBuilder builder(k);
    for (const auto& child : children) builder.append(child, [](std::span<const LabelId>) {});
    return builder.new_kgrams();
}

void BaseKernel::validate() const {
    if (p < 1) throw ConfigError("kernel degree p must be at least 1");
    if (c < 0.0 || !std::isfinite(c)) throw ConfigError("kernel offset c must be finite and non-negative");
    if (kind == KernelKind::Cosine && c != 0.0) throw ConfigError("the cosine kernel does not take an offset c");
}

double exact_base_kernel(const KGramVector& x, const KGramVector& y, const BaseKernel& kernel) {
    kernel.validate();
    if (kernel.kind == KernelKind::Poly) return std::pow(x.dot(y) + kernel.c, kernel.p);
    const double norms = x.norm() * y.norm();
    if (norms == 0.0) return 0.0;
    // Rounding can push the ratio of identical vectors just past 1.
    return std::pow(std::clamp(x.dot(y) / norms, -1.0, 1.0), kernel.p);
}

}  // namespace kong
