#pragma once

#include <cstdint>
#include <limits>

namespace bwtex {

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// SplitMix64 stream. Satisfies UniformRandomBitGenerator so it can drive
/// <random> distributions and std::shuffle.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    constexpr explicit SplitMix64(std::uint64_t state = 0) : state_(state) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return splitmix64_mix(state_);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) by rejection, bias-free.
    constexpr std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = max() - max() % bound;
        for (;;) {
            const std::uint64_t r = (*this)();
            if (r < limit) return r % bound;
        }
    }

    /// Independent substream keyed by a counter; the parent is not advanced.
    constexpr SplitMix64 split(std::uint64_t key) const { return SplitMix64(state_ ^ splitmix64_mix(key)); }

private:
    std::uint64_t state_;
};

/// Counter-based stream for lattice cell (i, j): stable regardless of how many
/// other cells exist.
constexpr SplitMix64 lattice_stream(std::uint64_t seed, std::uint32_t i, std::uint32_t j) {
    const std::uint64_t key = (static_cast<std::uint64_t>(i) << 32) | j;
    return SplitMix64(seed ^ splitmix64_mix(key));
}

} // namespace bwtex
