#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace kcurves {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of stream `index` under `master`. Streams are independent of each other
/// and stream k can be produced without producing streams < k.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// FNV-1a over the bytes of `s`; stable across platforms and runs.
constexpr std::uint64_t stable_hash(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Per-cell seed of a sweep: hash of (master seed, subcommand, cell indices).
inline std::uint64_t cell_seed(std::uint64_t master, std::string_view subcommand,
                               std::initializer_list<std::uint64_t> indices) noexcept {
    std::uint64_t h = derive_seed(master, stable_hash(subcommand));
    for (std::uint64_t i : indices) h = derive_seed(h, i);
    return h;
}

inline Rng make_rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Rng(seq);
}

}  // namespace kcurves
