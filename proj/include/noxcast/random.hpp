#pragma once

// Deterministic random number generation for every seeded subsystem.
//
// Generator: xoshiro256++ (Blackman & Vigna), state expanded from a 64-bit
// seed with SplitMix64. All draws are built from integer operations plus a
// fixed 53-bit mantissa construction, so identical seeds give identical
// streams on every platform; none of this depends on libstdc++
// distribution internals.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace noxcast {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Mixes a base seed with one or two stream tags. Used to hand independent
// sub-streams to subsystems (per-variable permutations, per-start draws)
// so execution order can never change results.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a, std::uint64_t tag_b = 0) {
    std::uint64_t s = base;
    std::uint64_t m = splitmix64_next(s);
    s ^= (tag_a + 0x9E3779B97F4A7C15ULL) * 0xBF58476D1CE4E5B9ULL;
    m ^= splitmix64_next(s);
    s ^= (tag_b + 0x94D049BB133111EBULL) * 0x2545F4914F6CDD1DULL;
    m ^= splitmix64_next(s);
    return m;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53 significant bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + next_double() * (hi - lo);
    }

    // Unbiased integer in [0, n) by masked rejection. n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t mask = mask_for(n - 1);
        std::uint64_t v;
        do {
            v = next_u64() & mask;
        } while (v >= n);
        return v;
    }

    // Fisher-Yates, descending index, so the permutation is a pure
    // function of the seed and the sequence length.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    static std::uint64_t mask_for(std::uint64_t v) {
        std::uint64_t mask = v;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        return mask;
    }

    std::uint64_t state_[4];
};

}  // namespace noxcast
