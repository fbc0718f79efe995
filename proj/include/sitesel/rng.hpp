#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sitesel {

// All randomness flows from one master seed through named substreams, so that
// adding a consumer never perturbs the draws of another.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stable 64-bit hash of a stream label (FNV-1a).
inline std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derives a child seed from (seed, label, index...). Order of mixing is fixed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
    return splitmix64(seed ^ splitmix64(hash_label(label)));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                 std::uint64_t a) {
    return splitmix64(derive_seed(seed, label) ^ splitmix64(a + 0x51ed270b7d2ca7dbULL));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                 std::uint64_t a, std::uint64_t b) {
    return splitmix64(derive_seed(seed, label, a) ^ splitmix64(b + 0x2545f4914f6cdd1dULL));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                 std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return splitmix64(derive_seed(seed, label, a, b) ^ splitmix64(c + 0x9e3779b97f4a7c15ULL));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace sitesel
