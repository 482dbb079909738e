#include "kong/fft.hpp"
#include "kong/sketch.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace kong;

namespace {

KGramVector random_vector(std::mt19937_64& rng, std::size_t nonzeros, LabelId universe, bool integral) {
    KGramVector v;
    std::uniform_int_distribution<LabelId> token(0, universe - 1);
    std::uniform_int_distribution<int> small(-5, 5);
    std::normal_distribution<double> normal;
    while (v.size() < nonzeros) {
        const TokenString gram{token(rng), token(rng)};
        if (v.get(gram) != 0.0) continue;
        const double x = integral ? static_cast<double>(small(rng)) : normal(rng);
        if (x != 0.0) v.update(gram, x);
    }
    return v;
}

/// Count-Sketch table computed straight from the slot function.
std::vector<double> slot_table(const KGramVector& v, std::uint64_t seed, std::size_t b, std::size_t rows,
                               std::size_t component) {
    std::vector<double> table(rows * b, 0.0);
    for (const auto& [gram, x] : v.entries()) {
        const auto key = kgram_key(seed, gram);
        for (std::size_t r = 0; r < rows; ++r) {
            const auto slot = sketch_slot(key, component, r, b);
            table[r * b + slot.bucket] += slot.sign * x;
        }
    }
    return table;
}

double sorted_median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

TEST_SUITE("sketch") {

TEST_CASE("fft matches the direct transform") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    for (std::size_t n : {1u, 2u, 4u, 8u, 64u, 256u}) {
        std::vector<std::complex<double>> x(n);
        for (auto& z : x) z = {normal(rng), normal(rng)};
        for (bool inverse : {false, true}) {
            auto y = x;
            fft(y, inverse);
            const auto expected = oracle::dft(x, inverse);
            for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y[i] - expected[i]) < 1e-9 * (1.0 + std::abs(expected[i])));
        }
        auto round = x;
        fft(round);
        fft(round, true);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(round[i] - x[i]) < 1e-12);
    }
    std::vector<std::complex<double>> bad(6);
    CHECK_THROWS_AS(fft(bad), ConfigError);
}

TEST_CASE("slot function is well formed") {
    for (std::uint64_t key = 0; key < 1000; ++key) {
        const auto slot = sketch_slot(key * 0x9e3779b97f4a7c15ULL, 1, 2, 64);
        CHECK(slot.bucket < 64);
        CHECK(std::abs(slot.sign) == 1.0);
    }
}

TEST_CASE("count sketch equals the table built from slots") {
    std::mt19937_64 rng(11);
    const auto v = random_vector(rng, 300, 50, false);
    for (std::size_t component : {0u, 3u}) {
        CountSketch s(42, 128, 4, component);
        s.feed(v);
        const auto expected = slot_table(v, 42, 128, 4, component);
        CHECK(std::equal(s.table().begin(), s.table().end(), expected.begin()));
    }
}

TEST_CASE("count sketch estimates are the median of row dots") {
    std::mt19937_64 rng(12);
    const auto x = random_vector(rng, 200, 40, true);
    const auto y = random_vector(rng, 200, 40, true);
    CountSketch a(9, 256, 5), b(9, 256, 5);
    a.feed(x);
    b.feed(y);
    std::vector<double> rows, norms;
    for (std::size_t r = 0; r < 5; ++r) {
        double s = 0.0, t = 0.0;
        for (std::size_t i = 0; i < 256; ++i) {
            s += a.row(r)[i] * b.row(r)[i];
            t += a.row(r)[i] * a.row(r)[i];
        }
        rows.push_back(s);
        norms.push_back(t);
    }
    CHECK(a.dot(b) == doctest::Approx(sorted_median(rows)));
    CHECK(a.norm() == doctest::Approx(std::sqrt(sorted_median(norms))));
}

TEST_CASE("count sketch is linear") {
    std::mt19937_64 rng(13);
    const auto x = random_vector(rng, 500, 60, true);
    const auto y = random_vector(rng, 500, 60, true);
    KGramVector sum = x;
    sum.add(y);
    CountSketch sx(5, 64, 3), sy(5, 64, 3), ss(5, 64, 3);
    sx.feed(x);
    sy.feed(y);
    ss.feed(sum);
    sx.add(sy);
    CHECK(sx == ss);
    CountSketch other(6, 64, 3);
    CHECK_THROWS_AS(sx.add(other), ConfigError);
}

TEST_CASE("count sketch row estimates are unbiased") {
    std::mt19937_64 rng(14);
    const auto x = random_vector(rng, 100, 30, false);
    const auto y = random_vector(rng, 100, 30, false);
    const double exact = x.dot(y);
    const double scale = x.norm() * y.norm();
    const int seeds = 2000;
    double mean = 0.0;
    for (int s = 0; s < seeds; ++s) {
        CountSketch a(static_cast<std::uint64_t>(s), 32, 1), b(static_cast<std::uint64_t>(s), 32, 1);
        a.feed(x);
        b.feed(y);
        mean += a.row_dot(b, 0) / seeds;
    }
    // Row variance is at most 2 (|x||y|)^2 / b.
    CHECK(std::abs(mean - exact) < 5.0 * scale * std::sqrt(2.0 / 32.0 / seeds));
}

TEST_CASE("tensor sketch of degree one is bucket-identical to count sketch") {
    std::mt19937_64 rng(15);
    const auto x = random_vector(rng, 400, 50, false);
    TensorSketch t(21, 512, 3, 1);
    t.feed(x);
    CountSketch c(21, 512, 3, 0);
    c.feed(x);
    const auto combined = t.finalize();
    CHECK(std::equal(combined.values().begin(), combined.values().end(), c.table().begin()));
    CHECK(t.component(0) == c);
}

TEST_CASE("tensor sketch finalization is the circular convolution of components") {
    std::mt19937_64 rng(16);
    const auto x = random_vector(rng, 60, 20, false);
    for (std::size_t p : {2u, 3u}) {
        TensorSketch t(33, 64, 2, p);
        t.feed(x);
        const auto combined = t.finalize();
        for (std::size_t r = 0; r < 2; ++r) {
            std::vector<double> acc(t.component(0).row(r).begin(), t.component(0).row(r).end());
            for (std::size_t c = 1; c < p; ++c) {
                const auto rowc = t.component(c).row(r);
                acc = oracle::circular_convolution(acc, std::vector<double>(rowc.begin(), rowc.end()));
            }
            for (std::size_t i = 0; i < 64; ++i) CHECK(combined.row(r)[i] == doctest::Approx(acc[i]).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("tensor sketch estimates a polynomial kernel on average") {
    std::mt19937_64 rng(17);
    const auto x = random_vector(rng, 40, 12, false);
    auto y = x;
    y.add(random_vector(rng, 40, 12, false));
    const double exact = std::pow(x.dot(y), 2);
    const double scale = std::pow(x.norm() * y.norm(), 2);
    const int seeds = 1000;
    double mean = 0.0;
    for (int s = 0; s < seeds; ++s) {
        TensorSketch a(static_cast<std::uint64_t>(s), 64, 1, 2), b(static_cast<std::uint64_t>(s), 64, 1, 2);
        a.feed(x);
        b.feed(y);
        mean += a.finalize().row_dot(b.finalize(), 0) / seeds;
    }
    CHECK(std::abs(mean - exact) < 5.0 * std::sqrt(2.0 * (exact * exact + scale * scale) / 64.0 / seeds));
}

TEST_CASE("sketch size suggestion") {
    SketchBudget budget{600, 1e5, 0.1, 0.5, 0.1, 1, 1.0};
    // (ln 600 + ln 1e5) ln 10 / (0.01 * 0.25) = 16495.6..., next power of two 32768.
    const double raw = (std::log(600.0) + std::log(1e5)) * std::log(10.0) / (0.1 * 0.1 * 0.5 * 0.5);
    CHECK(raw > 16384.0);
    CHECK(raw < 32768.0);
    CHECK(suggest_sketch_size(budget) == 32768);
    CHECK(suggest_sketch_size({1, 1, 1.0, 0.5, 0.5, 1, 1.0}) == kMinSketchSize);
    CHECK_THROWS_AS(suggest_sketch_size({1, 1, 1.0, 1.5, 0.5, 1, 1.0}), ConfigError);
}

TEST_CASE("binary sketch round trip") {
    std::mt19937_64 rng(18);
    const auto x = random_vector(rng, 50, 20, false);
    TensorSketch t(77, 32, 3, 2);
    t.feed(x);
    std::stringstream buffer;
    write_sketch(buffer, t);
    CHECK(buffer.str().size() == 8 + 4 + 8 + 4 + 4 + 4 + 2 * 3 * 32 * 8);
    CHECK(buffer.str().substr(0, 8) == "KONGTSK1");
    CHECK(read_tensor_sketch(buffer) == t);

    std::stringstream combined;
    write_sketch(combined, t.finalize());
    CHECK(read_combined_sketch(combined) == t.finalize());

    std::stringstream wrong(buffer.str());
    CHECK_THROWS_AS(read_combined_sketch(wrong), DataError);
    std::stringstream truncated(buffer.str().substr(0, 40));
    CHECK_THROWS_AS(read_tensor_sketch(truncated), DataError);
}

TEST_CASE("sketch shapes are validated") {
    CHECK_THROWS_AS(CountSketch(1, 100, 1), ConfigError);
    CHECK_THROWS_AS(CountSketch(1, 64, 0), ConfigError);
    CHECK_THROWS_AS(TensorSketch(1, 64, 1, 0), ConfigError);
}

}  // TEST_SUITE
