#include "kong/sketch.hpp"

#include "kong/detail/binary.hpp"
#include "kong/fft.hpp"
#include "kong/hash.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <istream>
#include <ostream>

namespace kong {

namespace {

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

void check_shape(std::size_t buckets, std::size_t rows) {
    if (!is_power_of_two(buckets)) throw ConfigError("sketch size " + std::to_string(buckets) + " is not a power of two");
    if (buckets > (std::size_t{1} << 31)) throw ConfigError("sketch size too large");
    if (rows == 0) throw ConfigError("sketch needs at least one row");
}

double row_inner(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

constexpr std::array<char, 8> kTensorMagic = {'K', 'O', 'N', 'G', 'T', 'S', 'K', '1'};
constexpr std::array<char, 8> kCombinedMagic = {'K', 'O', 'N', 'G', 'C', 'S', 'K', '1'};

using detail::get;
using detail::put;

struct Header {
    std::uint64_t seed;
    std::uint32_t buckets;
    std::uint32_t rows;
    std::uint32_t degree;
};

void write_header(std::ostream& out, const std::array<char, 8>& magic, const Header& h) {
    out.write(magic.data(), magic.size());
    put<std::uint32_t>(out, kSketchFormatVersion);
    put<std::uint64_t>(out, h.seed);
    put<std::uint32_t>(out, h.buckets);
    put<std::uint32_t>(out, h.rows);
    put<std::uint32_t>(out, h.degree);
}

Header read_header(std::istream& in, const std::array<char, 8>& magic) {
    std::array<char, 8> found{};
    in.read(found.data(), found.size());
    if (!in || found != magic) throw DataError("not a sketch stream of the expected kind");
    const auto version = get<std::uint32_t>(in);
    if (version != kSketchFormatVersion) throw DataError("unsupported sketch format version " + std::to_string(version));
    Header h{};
    h.seed = get<std::uint64_t>(in);
    h.buckets = get<std::uint32_t>(in);
    h.rows = get<std::uint32_t>(in);
    h.degree = get<std::uint32_t>(in);
    if (h.degree == 0) throw DataError("sketch degree must be positive");
    check_shape(h.buckets, h.rows);
    return h;
}

}  // namespace

SketchCounters& sketch_counters() noexcept {
    thread_local SketchCounters counters;
    return counters;
}

std::uint64_t kgram_key(std::uint64_t seed, std::span<const LabelId> gram) noexcept {
    ++sketch_counters().kgram_hashes;
    return hash_tokens(seed, gram);
}

SketchSlot sketch_slot(std::uint64_t key, std::size_t component, std::size_t row, std::size_t buckets) noexcept {
    const std::uint64_t salt = mix64((static_cast<std::uint64_t>(component) << 32) ^ static_cast<std::uint64_t>(row));
    const std::uint64_t h = mix64(key ^ salt);
    return {static_cast<std::uint32_t>(h & (buckets - 1)), (h >> 63) ? -1.0 : 1.0};
}

// ---- CountSketch

CountSketch::CountSketch(std::uint64_t seed, std::size_t buckets, std::size_t rows, std::size_t component)
    : seed_(seed), buckets_(buckets), rows_(rows), component_(component) {
    check_shape(buckets, rows);
    table_.assign(rows * buckets, 0.0);
}

void CountSketch::update(std::span<const LabelId> gram, double weight) { update_key(kgram_key(seed_, gram), weight); }

void CountSketch::update_key(std::uint64_t key, double weight) {
    auto& counters = sketch_counters();
    for (std::size_t r = 0; r < rows_; ++r) {
        const SketchSlot slot = sketch_slot(key, component_, r, buckets_);
        table_[r * buckets_ + slot.bucket] += slot.sign * weight;
    }
    counters.cell_updates += rows_;
}

void CountSketch::feed(const KGramVector& vector) {
    for (const auto& [gram, weight] : vector.entries()) update(gram, weight);
}

void CountSketch::add(const CountSketch& other) {
    require_compatible(other);
    for (std::size_t i = 0; i < table_.size(); ++i) table_[i] += other.table_[i];
    sketch_counters().merged_cells += table_.size();
}

void CountSketch::scale(double factor) {
    for (double& x : table_) x *= factor;
}

double CountSketch::row_dot(const CountSketch& other, std::size_t r) const {
    require_compatible(other);
    return row_inner(row(r), other.row(r));
}

double CountSketch::dot(const CountSketch& other) const {
    require_compatible(other);
    std::vector<double> estimates(rows_);
    for (std::size_t r = 0; r < rows_; ++r) estimates[r] = row_inner(row(r), other.row(r));
    return median(std::move(estimates));
}

double CountSketch::norm() const {
    std::vector<double> estimates(rows_);
    for (std::size_t r = 0; r < rows_; ++r) estimates[r] = row_inner(row(r), row(r));
    return std::sqrt(median(std::move(estimates)));
}

std::span<const double> CountSketch::row(std::size_t r) const {
    return std::span<const double>(table_).subspan(r * buckets_, buckets_);
}

std::span<double> CountSketch::row(std::size_t r) { return std::span<double>(table_).subspan(r * buckets_, buckets_); }

bool CountSketch::compatible(const CountSketch& other) const noexcept {
    return seed_ == other.seed_ && buckets_ == other.buckets_ && rows_ == other.rows_ && component_ == other.component_;
}

void CountSketch::require_compatible(const CountSketch& other) const {
    if (!compatible(other)) throw ConfigError("count sketches differ in seed, size, rows or component");
}

// ---- CombinedSketch

CombinedSketch::CombinedSketch(std::uint64_t seed, std::size_t buckets, std::size_t rows, std::size_t degree)
    : seed_(seed), buckets_(buckets), rows_(rows), degree_(degree) {
    check_shape(buckets, rows);
    values_.assign(rows * buckets, 0.0);
}

double CombinedSketch::row_dot(const CombinedSketch& other, std::size_t r) const {
    require_compatible(other);
    return row_inner(row(r), other.row(r));
}

double CombinedSketch::dot(const CombinedSketch& other) const {
    require_compatible(other);
    std::vector<double> estimates(rows_);
    for (std::size_t r = 0; r < rows_; ++r) estimates[r] = row_inner(row(r), other.row(r));
    return median(std::move(estimates));
}

void CombinedSketch::add(const CombinedSketch& other) {
    require_compatible(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
}

void CombinedSketch::scale(double factor) {
    for (double& x : values_) x *= factor;
}

std::span<const double> CombinedSketch::row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * buckets_, buckets_);
}

std::span<double> CombinedSketch::row(std::size_t r) {
    return std::span<double>(values_).subspan(r * buckets_, buckets_);
}

bool CombinedSketch::compatible(const CombinedSketch& other) const noexcept {
    return seed_ == other.seed_ && buckets_ == other.buckets_ && rows_ == other.rows_ && degree_ == other.degree_;
}

void CombinedSketch::require_compatible(const CombinedSketch& other) const {
    if (!compatible(other)) throw ConfigError("combined sketches differ in seed, size, rows or degree");
}

// ---- TensorSketch

TensorSketch::TensorSketch(std::uint64_t seed, std::size_t buckets, std::size_t rows, std::size_t degree)
    : seed_(seed), buckets_(buckets), rows_(rows) {
    if (degree == 0) throw ConfigError("tensor sketch degree must be at least 1");
    check_shape(buckets, rows);
    components_.reserve(degree);
    for (std::size_t c = 0; c < degree; ++c) components_.emplace_back(seed, buckets, rows, c);
}

void TensorSketch::update(std::span<const LabelId> gram, double weight) {
    const std::uint64_t key = kgram_key(seed_, gram);
    for (auto& component : components_) component.update_key(key, weight);
}

void TensorSketch::feed(const KGramVector& vector) {
    for (const auto& [gram, weight] : vector.entries()) update(gram, weight);
}

void TensorSketch::add(const TensorSketch& other) {
    if (!compatible(other)) throw ConfigError("tensor sketches differ in seed, size, rows or degree");
    for (std::size_t c = 0; c < components_.size(); ++c) components_[c].add(other.components_[c]);
}

CombinedSketch TensorSketch::finalize() const {
    CombinedSketch out(seed_, buckets_, rows_, degree());
    if (degree() == 1) {
        std::copy(components_[0].table().begin(), components_[0].table().end(), out.values().begin());
        return out;
    }
    std::vector<std::complex<double>> product(buckets_);
    std::vector<std::complex<double>> spectrum(buckets_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < degree(); ++c) {
            const auto source = components_[c].row(r);
            auto& target = c == 0 ? product : spectrum;
            for (std::size_t i = 0; i < buckets_; ++i) target[i] = {source[i], 0.0};
            fft(target);
            if (c > 0) {
                for (std::size_t i = 0; i < buckets_; ++i) {
                    const auto a = product[i];
                    const auto b = spectrum[i];
                    product[i] = {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
                }
            }
        }
        fft(product, true);
        auto row = out.row(r);
        for (std::size_t i = 0; i < buckets_; ++i) row[i] = product[i].real();
        sketch_counters().transforms += degree() + 1;
    }
    return out;
}

bool TensorSketch::compatible(const TensorSketch& other) const noexcept {
    return seed_ == other.seed_ && buckets_ == other.buckets_ && rows_ == other.rows_ && degree() == other.degree();
}

// ---- budget

void SketchBudget::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0,1]");
    if (graphs < 1 || max_nodes < 1) throw ConfigError("graph and node counts must be at least 1");
    if (degree < 1) throw ConfigError("degree must be at least 1");
}

std::size_t suggest_sketch_size(const SketchBudget& budget) {
    budget.validate();
    const double raw = (std::log(budget.graphs) + std::log(budget.max_nodes)) * std::log(1.0 / budget.delta) /
                       (budget.alpha * budget.alpha * budget.epsilon * budget.epsilon);
    if (!(raw < static_cast<double>(std::size_t{1} << 62))) throw ConfigError("suggested sketch size overflows");
    std::size_t size = kMinSketchSize;
    while (static_cast<double>(size) < raw) size <<= 1;
    return size;
}

// ---- serialization

void write_sketch(std::ostream& out, const TensorSketch& sketch) {
    write_header(out, kTensorMagic,
                 {sketch.seed(), static_cast<std::uint32_t>(sketch.buckets()), static_cast<std::uint32_t>(sketch.rows()),
                  static_cast<std::uint32_t>(sketch.degree())});
    for (std::size_t c = 0; c < sketch.degree(); ++c)
        for (double x : sketch.component(c).table()) put<double>(out, x);
    if (!out) throw DataError("failed to write sketch");
}

void write_sketch(std::ostream& out, const CombinedSketch& sketch) {
    write_header(out, kCombinedMagic,
                 {sketch.seed(), static_cast<std::uint32_t>(sketch.buckets()), static_cast<std::uint32_t>(sketch.rows()),
                  static_cast<std::uint32_t>(sketch.degree())});
    for (double x : sketch.values()) put<double>(out, x);
    if (!out) throw DataError("failed to write sketch");
}

TensorSketch read_tensor_sketch(std::istream& in) {
    const Header h = read_header(in, kTensorMagic);
    TensorSketch sketch(h.seed, h.buckets, h.rows, h.degree);
    for (std::size_t c = 0; c < h.degree; ++c)
        for (double& x : sketch.component(c).table()) x = get<double>(in);
    return sketch;
}

CombinedSketch read_combined_sketch(std::istream& in) {
    const Header h = read_header(in, kCombinedMagic);
    CombinedSketch sketch(h.seed, h.buckets, h.rows, h.degree);
    for (double& x : sketch.values()) x = get<double>(in);
    return sketch;
}

}  // namespace kong
