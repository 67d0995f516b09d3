#pragma once

#include <cstdint>
#include <random>

namespace d2dsim {

using Rng = std::mt19937_64;

/// Stream tags mixed into derived seeds. Channel draws (topology, arrivals,
/// fading) share one stream per repetition so that every policy sees the same
/// realization; policy-side coin flips get their own stream per policy kind.
enum class StreamTag : std::uint64_t { Channel = 1, Policy = 2 };

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t rep,
                                    StreamTag tag, std::uint64_t sub = 0) noexcept
{
    std::uint64_t h = mix64(master);
    h = mix64(h ^ rep);
    h = mix64(h ^ static_cast<std::uint64_t>(tag));
    return mix64(h ^ sub);
}

inline Rng make_rng(std::uint64_t master, std::uint64_t rep, StreamTag tag,
                    std::uint64_t sub = 0)
{
    return Rng{derive_seed(master, rep, tag, sub)};
}

} // namespace d2dsim
