#pragma once

// Reference implementations used only by tests. They follow the definitions literally and
// share no code with the library beyond the Graph accessors and the hash slot function.

#include "kong/graph.hpp"
#include "kong/sketch.hpp"
#include "kong/traversal.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

using Tokens = std::vector<std::uint32_t>;
using Counts = std::map<Tokens, double>;

/// s_v^i by direct recursion.
inline Tokens node_string(const kong::Graph& g, kong::TraversalKind kind, std::uint32_t v, std::size_t i) {
    Tokens out;
    if (i == 0 || kind == kong::TraversalKind::WL) out.push_back(g.label(v));
    if (i == 0) return out;
    for (std::uint32_t u : g.neighbors(v)) {
        const Tokens child = node_string(g, kind, u, i - 1);
        out.insert(out.end(), child.begin(), child.end());
    }
    return out;
}

/// S_v^h: s^0 ... s^h for BFS, s^h for WL.
inline Tokens final_string(const kong::Graph& g, kong::TraversalKind kind, std::uint32_t v, std::size_t h) {
    if (kind == kong::TraversalKind::WL) return node_string(g, kind, v, h);
    Tokens out;
    for (std::size_t i = 0; i <= h; ++i) {
        const Tokens part = node_string(g, kind, v, i);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

inline Counts grams(const Tokens& s, std::size_t k) {
    Counts out;
    for (std::size_t i = 0; i + k <= s.size(); ++i) out[Tokens(s.begin() + i, s.begin() + i + k)] += 1.0;
    return out;
}

inline std::size_t gram_count(std::size_t length, std::size_t k) { return length >= k ? length - k + 1 : 0; }

inline double dot(const Counts& a, const Counts& b) {
    double s = 0.0;
    for (const auto& [key, x] : a) {
        auto it = b.find(key);
        if (it != b.end()) s += x * it->second;
    }
    return s;
}

inline double cosine(const Counts& a, const Counts& b) {
    const double na = std::sqrt(dot(a, a));
    const double nb = std::sqrt(dot(b, b));
    return na == 0.0 || nb == 0.0 ? 0.0 : dot(a, b) / (na * nb);
}

/// O(b^2) circular convolution.
inline std::vector<double> circular_convolution(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[(i + j) % n] += a[i] * b[j];
    return out;
}

/// O(n^2) discrete Fourier transform.
inline std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x, bool inverse) {
    const std::size_t n = x.size();
    const double pi = std::acos(-1.0);
    std::vector<std::complex<double>> out(n);
    for (std::size_t f = 0; f < n; ++f) {
        std::complex<double> sum = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = (inverse ? 2.0 : -2.0) * pi * static_cast<double>(f * t % n) / static_cast<double>(n);
            sum += x[t] * std::polar(1.0, angle);
        }
        out[f] = inverse ? sum / static_cast<double>(n) : sum;
    }
    return out;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (at(p, q) == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = at(i, i);
    return out;
}

}  // namespace oracle
