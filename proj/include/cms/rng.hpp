#pragma once

/**
 * @file rng.hpp
 * @brief Seeded, platform-independent random streams.
 *
 * std::uniform_*_distribution is implementation-defined, so sampling goes
 * through explicit integer arithmetic on a mt19937_64 stream. Same seed,
 * same bytes, everywhere. Streams are split per purpose/index so that
 * changing one consumer does not shift another's draws.
 */

#include <cstdint>
#include <random>
#include <vector>

namespace cms {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Derived stream for (purpose tag, index); stable under reordering of calls.
    static Rng split(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
        // splitmix64 finalizer over the combined key
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (tag + 1) + 0xbf58476d1ce4e5b9ull * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        return Rng(z);
    }

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform in [0,1) with 53 random bits.
    double next_unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), n >= 1, by rejection (unbiased).
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do { x = eng_(); } while (x >= limit);
        return x % n;
    }

    /// Index sampled from a discrete distribution given by nonnegative weights.
    std::size_t next_weighted(const std::vector<double>& w) {
        double total = 0;
        for (double x : w) total += x;
        double u = next_unit() * total;
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            u -= w[i];
            if (u < 0) return i;
        }
        return w.empty() ? 0 : w.size() - 1;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace cms
