#include "kong/fft.hpp"

#include "kong/common.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>
#include <utility>
#include <vector>

namespace kong {

namespace {

/// exp(-2 pi i j / n) for j < n/2, cached per size and thread.
const std::vector<std::complex<double>>& twiddles(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::vector<std::complex<double>>> cache;
    auto& table = cache[n];
    if (table.empty() && n > 1) {
        table.resize(n / 2);
        for (std::size_t j = 0; j < n / 2; ++j) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
            table[j] = {std::cos(angle), std::sin(angle)};
        }
    }
    return table;
}

}  // namespace

// Plain product; std::complex operator* carries NaN recovery that dominates the butterfly.
static inline std::complex<double> mul(std::complex<double> a, std::complex<double> b) noexcept {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

void fft(std::span<std::complex<double>> data, bool inverse) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) throw ConfigError("FFT size " + std::to_string(n) + " is not a power of two");
    if (n == 1) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    const auto& w = twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                std::complex<double> tw = w[j * stride];
                if (inverse) tw = std::conj(tw);
                const std::complex<double> a = data[start + j];
                const std::complex<double> b = mul(data[start + j + half], tw);
                data[start + j] = a + b;
                data[start + j + half] = a - b;
            }
        }
    }

    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& x : data) x *= scale;
    }
}

}  // namespace kong
