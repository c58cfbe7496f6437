#pragma once

#include <cstdint>

#include "sasi/word96.hpp"

namespace sasi {

// Deterministic 96-bit word stream over splitmix64: output k is
// mix(seed + (k+1)*golden). Counter-indexed so callers may stride streams
// for parallel trials and still match sequential runs bit-for-bit.
struct NonceSource {
    uint64_t seed = 0;
    uint64_t counter = 0;

    static constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

    static constexpr uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    constexpr uint64_t next_u64() { return mix(seed + (++counter) * kGolden); }

    // Bits 95..32 from one splitmix output, bits 31..0 from the low half of
    // the next; advances the counter by 2.
    constexpr Word96 next_word() {
        uint64_t hi = next_u64();
        uint64_t lo = next_u64();
        return Word96{(u128(hi) << 32) | (lo & 0xFFFFFFFFull)};
    }
};

}  // namespace sasi
