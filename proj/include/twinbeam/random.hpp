#pragma once

#include <cstdint>
#include <random>

namespace twinbeam {

// SplitMix64 finalizer; a bijective 64-bit mixer.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of an independent substream identified by (seed, stream, index).
// Window i of a sweep always draws from the same substream regardless of
// how windows are scheduled across threads.
[[nodiscard]] constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream,
                                                     std::uint64_t index) noexcept {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

[[nodiscard]] inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream,
                                               std::uint64_t index) {
    return std::mt19937_64(substream_seed(seed, stream, index));
}

}  // namespace twinbeam
