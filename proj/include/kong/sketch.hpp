#pragma once

#include "kong/common.hpp"
#include "kong/kgram.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace kong {

/// Per-thread operation counters used to check the per-edge cost of sketch maintenance.
struct SketchCounters {
    std::uint64_t kgram_hashes = 0;   ///< token sequences hashed
    std::uint64_t cell_updates = 0;   ///< single-cell signed increments
    std::uint64_t merged_cells = 0;   ///< cells touched by sketch additions
    std::uint64_t transforms = 0;     ///< FFTs performed while combining components
};

SketchCounters& sketch_counters() noexcept;

/// Bucket and sign of one k-gram in one row of one component.
struct SketchSlot {
    std::uint32_t bucket;
    double sign;
};

/// Hash of a k-gram that every row/component slot is derived from.
std::uint64_t kgram_key(std::uint64_t seed, std::span<const LabelId> gram) noexcept;
SketchSlot sketch_slot(std::uint64_t key, std::size_t component, std::size_t row, std::size_t buckets) noexcept;

/// Count-Sketch: rows x buckets signed counters. The hash functions depend only on
/// (seed, component, row), so sketches built anywhere with the same parameters are comparable
/// and add bucket-wise.
class CountSketch {
public:
    CountSketch() = default;
    /// `buckets` must be a power of two; `component` selects an independent hash family.
    CountSketch(std::uint64_t seed, std::size_t buckets, std::size_t rows, std::size_t component = 0);

    void update(std::span<const LabelId> gram, double weight);
    /// Update with a precomputed kgram_key.
    void update_key(std::uint64_t key, double weight);
    void feed(const KGramVector& vector);
    void add(const CountSketch& other);
    void scale(double factor);

    /// Median over rows of the per-row inner products.
    double dot(const CountSketch& other) const;
    double row_dot(const CountSketch& other, std::size_t row) const;
    /// sqrt of the median over rows of the per-row squared norms.
    double norm() const;

    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t buckets() const noexcept { return buckets_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t component() const noexcept { return component_; }
    std::span<const double> row(std::size_t r) const;
    std::span<double> row(std::size_t r);
    std::span<const double> table() const noexcept { return table_; }
    std::span<double> table() noexcept { return table_; }

    /// Same seed, bucket count, row count and component.
    bool compatible(const CountSketch& other) const noexcept;
    bool operator==(const CountSketch&) const = default;

private:
    void require_compatible(const CountSketch& other) const;

    std::uint64_t seed_ = 0;
    std::size_t buckets_ = 0;
    std::size_t rows_ = 0;
    std::size_t component_ = 0;
    std::vector<double> table_;
};

/// A finalized Tensor-Sketch: rows x buckets values whose per-row inner products estimate
/// (<x,y>)^p.
class CombinedSketch {
public:
    CombinedSketch() = default;
    CombinedSketch(std::uint64_t seed, std::size_t buckets, std::size_t rows, std::size_t degree);

    double dot(const CombinedSketch& other) const;
    double row_dot(const CombinedSketch& other, std::size_t row) const;
    void add(const CombinedSketch& other);
    void scale(double factor);

    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t buckets() const noexcept { return buckets_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t degree() const noexcept { return degree_; }
    std::span<const double> row(std::size_t r) const;
    std::span<double> row(std::size_t r);
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    bool compatible(const CombinedSketch& other) const noexcept;
    bool operator==(const CombinedSketch&) const = default;

private:
    void require_compatible(const CombinedSketch& other) const;

    std::uint64_t seed_ = 0;
    std::size_t buckets_ = 0;
    std::size_t rows_ = 0;
    std::size_t degree_ = 1;
    std::vector<double> values_;
};

/// Tensor-Sketch of degree p: p Count-Sketches of the same vector with independent hash
/// families, combined by per-row circular convolution.
class TensorSketch {
public:
    TensorSketch() = default;
    TensorSketch(std::uint64_t seed, std::size_t buckets, std::size_t rows, std::size_t degree);

    void update(std::span<const LabelId> gram, double weight);
    void feed(const KGramVector& vector);
    void add(const TensorSketch& other);

    /// Per row: inverse FFT of the product of the components' FFTs. Degree 1 returns the
    /// single component unchanged.
    CombinedSketch finalize() const;

    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t buckets() const noexcept { return buckets_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t degree() const noexcept { return components_.size(); }
    const CountSketch& component(std::size_t c) const { return components_.at(c); }
    CountSketch& component(std::size_t c) { return components_.at(c); }

    bool compatible(const TensorSketch& other) const noexcept;
    bool operator==(const TensorSketch&) const = default;

private:
    std::uint64_t seed_ = 0;
    std::size_t buckets_ = 0;
    std::size_t rows_ = 0;
    std::vector<CountSketch> components_;
};

/// Inputs of the accuracy/size trade-off.
struct SketchBudget {
    double graphs = 1;        ///< M
    double max_nodes = 1;     ///< n
    double alpha = 1.0;       ///< cosine cutoff, (0,1]
    double epsilon = 0.5;     ///< (0,1)
    double delta = 0.1;       ///< (0,1)
    int degree = 1;           ///< p
    double norm_bound = 1.0;  ///< R, diagnostics only

    void validate() const;
};

inline constexpr std::size_t kMinSketchSize = 16;

/// Smallest power of two >= (ln M + ln n) ln(1/delta) / (alpha^2 eps^2), at least 16.
std::size_t suggest_sketch_size(const SketchBudget& budget);

/// Binary layout, little-endian: magic (8 bytes), u32 version, u64 seed, u32 buckets,
/// u32 rows, u32 degree, then degree*rows*buckets f64 values (component-major, rows
/// row-major). "KONGTSK1" holds component tables, "KONGCSK1" a combined sketch.
void write_sketch(std::ostream& out, const TensorSketch& sketch);
void write_sketch(std::ostream& out, const CombinedSketch& sketch);
TensorSketch read_tensor_sketch(std::istream& in);
CombinedSketch read_combined_sketch(std::istream& in);

inline constexpr std::uint32_t kSketchFormatVersion = 1;

}  // namespace kong
