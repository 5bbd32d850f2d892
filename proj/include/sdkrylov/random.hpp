#pragma once

#include <cstdint>

namespace sdkrylov {

/// SplitMix64: the 64-bit splittable generator used everywhere randomness is
/// needed (random right-hand sides, probe vectors, test matrices). Constants
/// are the standard ones (Steele, Lea & Flood); fixed here so that every
/// seeded result is reproducible bit-for-bit across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [-1, 1).
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

private:
    std::uint64_t state_;
};

}  // namespace sdkrylov
