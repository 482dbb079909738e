#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace kong {

constexpr bool is_power_of_two(std::size_t x) noexcept { return x != 0 && (x & (x - 1)) == 0; }

/// In-place iterative radix-2 FFT. The inverse transform includes the 1/n factor.
/// Throws ConfigError when the size is not a power of two.
void fft(std::span<std::complex<double>> data, bool inverse = false);

}  // namespace kong
