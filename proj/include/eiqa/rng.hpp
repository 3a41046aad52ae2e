#pragma once

#include <cmath>
#include <cstdint>

namespace eiqa {

// Counter-based generator (splitmix64 finalizer). Every draw is a pure
// function of (seed, stream, counter), so parallel loops stay bit-stable
// regardless of thread count or iteration order.
namespace rng {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return mix64(mix64(mix64(seed) ^ stream) ^ counter);
}

// FNV-1a over bytes; used to key per-reference streams by identity rather
// than by list position, so manifests survive input reordering.
inline std::uint64_t fnv1a(const void* bytes, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Uniform in [0, 1).
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(hash(seed, stream, counter) >> 11) * 0x1.0p-53;
}

// Uniform integer in [lo, hi] inclusive.
inline int uniform_int(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter,
                       int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(hash(seed, stream, counter) % span);
}

// Standard normal via Box-Muller; one deterministic draw per counter.
inline double gaussian(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const double u1 = 1.0 - uniform01(seed, stream, counter * 2);     // (0, 1]
    const double u2 = uniform01(seed, stream, counter * 2 + 1);       // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace rng
} // namespace eiqa
