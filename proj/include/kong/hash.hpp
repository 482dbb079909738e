#pragma once

#include "kong/common.hpp"

#include <cstdint>
#include <span>

namespace kong {

/// 64-bit finalizer (splitmix64). Bijective, good avalanche.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept {
    return mix64(seed ^ mix64(value));
}

/// Hash of a token sequence. The length is part of the encoding, so sequences of
/// different lengths never share a canonical byte stream.
inline std::uint64_t hash_tokens(std::uint64_t seed, std::span<const LabelId> tokens) noexcept {
    std::uint64_t h = hash_combine(seed, tokens.size());
    for (LabelId t : tokens) h = hash_combine(h, t);
    return h;
}

}  // namespace kong
