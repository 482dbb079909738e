#pragma once

#include "kong/common.hpp"

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace kong {

using KGram = TokenString;

/// Lexicographic token order that also compares spans against stored k-grams.
struct TokenLess {
    using is_transparent = void;
    bool operator()(std::span<const LabelId> a, std::span<const LabelId> b) const noexcept {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

/// Sparse k-gram frequency vector. Stored values are always nonzero; iteration is in
/// lexicographic k-gram order.
class KGramVector {
public:
    using Map = std::map<KGram, double, TokenLess>;

    KGramVector() = default;
    KGramVector(std::initializer_list<std::pair<const KGram, double>> entries);

    /// Adds `weight` to the coordinate of `gram`; drops the entry if it cancels to zero.
    void update(std::span<const LabelId> gram, double weight = 1.0);
    void add(const KGramVector& other);
    void scale(double factor);

    double get(std::span<const LabelId> gram) const;
    double dot(const KGramVector& other) const;
    double squared_norm() const;
    double norm() const;

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const Map& entries() const noexcept { return entries_; }

    bool operator==(const KGramVector&) const = default;

private:
    Map entries_;
};

/// Counts every contiguous length-k token window of `tokens`.
KGramVector count_kgrams(std::span<const LabelId> tokens, std::size_t k);

/// Length plus the tokens needed to form k-grams across a concatenation junction: the full
/// body when length <= 2(k-1), otherwise the (k-1)-prefix followed by the (k-1)-suffix.
class Boundary {
public:
    Boundary() = default;
    explicit Boundary(std::size_t k) : k_(k) {}

    static Boundary of(std::span<const LabelId> tokens, std::size_t k);
    /// Rebuilds a boundary from its stored tokens (as returned by tokens()); throws DataError
    /// when the token count does not fit the length.
    static Boundary restore(std::size_t k, std::uint64_t length, TokenString tokens);

    std::size_t k() const noexcept { return k_; }
    std::uint64_t length() const noexcept { return length_; }
    std::span<const LabelId> prefix() const noexcept;
    std::span<const LabelId> suffix() const noexcept;
    /// Whole token sequence when it is short enough to be kept, else nullopt.
    std::optional<std::span<const LabelId>> short_body() const noexcept;
    /// Number of explicitly stored tokens.
    std::size_t stored_tokens() const noexcept { return tokens_.size(); }
    std::span<const LabelId> tokens() const noexcept { return tokens_; }

    bool operator==(const Boundary&) const = default;

private:
    friend class BoundaryBuilder;

    std::size_t k_ = 1;
    std::uint64_t length_ = 0;
    TokenString tokens_;
};

/// Left-to-right concatenation of boundaries. Emits exactly the k-grams that span at least
/// one junction, each once: at the junction of the child holding its last token.
class BoundaryBuilder {
public:
    explicit BoundaryBuilder(std::size_t k) : k_(k) {}

    template <class Emit>
    void append(const Boundary& child, Emit&& emit);

    std::size_t new_kgrams() const noexcept { return new_kgrams_; }
    std::uint64_t length() const noexcept { return length_; }
    std::size_t stored_tokens() const noexcept { return head_.size() + tail_.size() + body_.size(); }
    Boundary finish() const;

private:
    std::size_t k_;
    std::uint64_t length_ = 0;
    TokenString head_;
    TokenString tail_;
    TokenString body_;
    std::size_t new_kgrams_ = 0;
    TokenString window_;
};

template <class Emit>
void BoundaryBuilder::append(const Boundary& child, Emit&& emit) {
    if (child.k() != k_) throw ConfigError("concatenating summaries with different k");
    if (child.length() == 0) return;
    const std::size_t edge = k_ - 1;
    const auto child_prefix = child.prefix();
    const auto child_suffix = child.suffix();

    if (length_ > 0 && edge > 0) {
        window_.assign(tail_.begin(), tail_.end());
        window_.insert(window_.end(), child_prefix.begin(), child_prefix.end());
        for (std::size_t start = 0; start < tail_.size() && start + k_ <= window_.size(); ++start) {
            emit(std::span<const LabelId>(window_.data() + start, k_));
            ++new_kgrams_;
        }
    }

    if (head_.size() < edge) {
        const std::size_t take = std::min(edge - head_.size(), child_prefix.size());
        head_.insert(head_.end(), child_prefix.begin(), child_prefix.begin() + static_cast<std::ptrdiff_t>(take));
    }

    tail_.insert(tail_.end(), child_suffix.begin(), child_suffix.end());
    if (tail_.size() > edge) tail_.erase(tail_.begin(), tail_.end() - static_cast<std::ptrdiff_t>(edge));

    const std::uint64_t new_length = saturating_add(length_, child.length());
    if (new_length <= 2 * edge) {
        const auto body = *child.short_body();
        body_.insert(body_.end(), body.begin(), body.end());
    } else {
        body_.clear();
    }
    length_ = new_length;
}

/// Operations the summary algebra needs from a payload: merge another payload and feed a
/// weighted k-gram.
template <class P>
concept KGramPayload = std::copy_constructible<P> && requires(P& p, const P& q, std::span<const LabelId> g) {
    p.add(q);
    p.update(g, 1.0);
};

/// Per-string state of the incremental traversal: boundary tokens plus the k-gram payload
/// (exact vector or sketch) of the whole string.
template <KGramPayload P>
struct StringSummary {
    Boundary boundary;
    P payload;

    std::size_t k() const noexcept { return boundary.k(); }
    std::uint64_t length() const noexcept { return boundary.length(); }
};

/// Summary of an explicit token sequence; `zero` is an empty payload of the right shape.
template <KGramPayload P>
StringSummary<P> summarize(std::span<const LabelId> tokens, std::size_t k, P zero) {
    if (k == 0) throw ConfigError("k must be at least 1");
    StringSummary<P> out{Boundary::of(tokens, k), std::move(zero)};
    for (std::size_t i = 0; i + k <= tokens.size(); ++i) out.payload.update(tokens.subspan(i, k), 1.0);
    return out;
}

/// Summary of the concatenation of `children` in order: child payloads summed, then the
/// k-grams created at the junctions fed in. `new_kgrams`, when given, receives their count.
template <KGramPayload P>
StringSummary<P> concat_summaries(std::span<const StringSummary<P>* const> children, std::size_t k, P zero,
                                  std::size_t* new_kgrams = nullptr) {
    if (k == 0) throw ConfigError("k must be at least 1");
    StringSummary<P> out{Boundary(k), std::move(zero)};
    BoundaryBuilder builder(k);
    for (const auto* child : children) {
        if (child->k() != k) throw ConfigError("concatenating summaries with different k");
        if (child->length() >= k) out.payload.add(child->payload);
        builder.append(child->boundary, [&](std::span<const LabelId> gram) { out.payload.update(gram, 1.0); });
    }
    out.boundary = builder.finish();
    if (new_kgrams) *new_kgrams = builder.new_kgrams();
    return out;
}

template <KGramPayload P>
StringSummary<P> concat_summaries(const std::vector<StringSummary<P>>& children, std::size_t k, P zero = P{}) {
    std::vector<const StringSummary<P>*> ptrs;
    ptrs.reserve(children.size());
    for (const auto& c : children) ptrs.push_back(&c);
    return concat_summaries<P>(std::span<const StringSummary<P>* const>(ptrs), k, std::move(zero));
}

/// Number of k-grams created by concatenating the boundaries in order.
std::size_t new_kgram_count(std::span<const Boundary> children, std::size_t k);

enum class KernelKind { Poly, Cosine };

/// Base string kernel on k-gram vectors: (<x,y> + c)^p or cos(x,y)^p.
struct BaseKernel {
    KernelKind kind = KernelKind::Poly;
    int p = 1;
    double c = 0.0;

    /// Throws ConfigError for p < 1, c < 0, or cosine with c != 0.
    void validate() const;
    bool operator==(const BaseKernel&) const = default;
};

/// Zero-norm vectors have cosine 0.
double exact_base_kernel(const KGramVector& x, const KGramVector& y, const BaseKernel& kernel);

}  // namespace kong
