#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "hotelml/error.hpp"

namespace hotelml {

// All randomness flows from one global seed through named substreams, so two
// components (folds, k-means seeding, bootstrap bags, ...) never share
// generator state and results do not depend on evaluation order.
//
// Draw helpers below avoid std::uniform_*_distribution on purpose: the
// standard leaves their output implementation-defined, while mt19937_64
// itself is pinned bit-for-bit, so everything here reproduces across
// platforms and standard libraries.

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 substream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) {
    return std::mt19937_64(mix64(mix64(seed ^ fnv1a64(name)) + index));
}

/// Unbiased integer in [0, n). n must be positive.
inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
    if (n == 0) throw ArgumentError("uniform_index: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = g();
    while (x >= limit) x = g();
    return x % n;
}

/// Uniform real in [0, 1) with 53 random bits.
inline double uniform_real(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller (two draws per value).
inline double normal(std::mt19937_64& g) {
    const double u1 = 1.0 - uniform_real(g);  // (0, 1]
    const double u2 = uniform_real(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& g) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[uniform_index(g, i)]);
    }
}

/// k distinct indices drawn uniformly from [0, n), returned in ascending order.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, std::mt19937_64& g) {
    if (k > n) throw ArgumentError("sample_without_replacement: k exceeds n");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + uniform_index(g, n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace hotelml
