#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace frameql {

/// Unbiased draw from [0, n). Unlike std::uniform_int_distribution the
/// sequence is identical across standard library implementations.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    constexpr std::uint64_t kMax = std::mt19937_64::max();
    const std::uint64_t last = kMax - (kMax % n + 1) % n;
    std::uint64_t r;
    do {
        r = rng();
    } while (r > last);
    return r % n;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace frameql
