#pragma once

#include <cstdint>
#include <limits>

namespace qfl {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based substream generator. Stream `s` of seed `seed` is a pure
/// function of (seed, s), so an ensemble split across any number of workers
/// draws identical numbers for each run index.
///
/// Satisfies UniformRandomBitGenerator.
class StreamRng {
public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix64(seed) ^ mix64(stream * 0xd1342543de82ef95ULL + 1)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform double in [0, 1) with 53 random bits; bit-reproducible across
    /// standard libraries, unlike std::uniform_real_distribution.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace qfl
