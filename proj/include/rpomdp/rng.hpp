#pragma once

#include <cstdint>

namespace rpomdp {

/// splitmix64 stream; used instead of <random> engines so seeded output
/// is identical across standard libraries.
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Unbiased integer in [0, bound).
    int below(int bound) {
        std::uint64_t limit = ~0ull - (~0ull % static_cast<std::uint64_t>(bound));
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return static_cast<int>(x % static_cast<std::uint64_t>(bound));
    }
};

}  // namespace rpomdp
