#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sasi {

using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr unsigned kWidth = 96;

// Which rotation the protocol uses: amount = b mod 96 (modular) or wt(b) (hamming).
enum class RotationVariant { Modular, Hamming };

// Unsigned 96-bit word; the value type for every protocol quantity.
// Invariant: v < 2^96. All arithmetic wraps mod 2^96.
struct Word96 {
    u128 v = 0;

    constexpr Word96() = default;
    constexpr explicit Word96(u128 x) : v(x & mask()) {}

    static constexpr u128 mask() { return (u128(1) << kWidth) - 1; }

    friend constexpr bool operator==(Word96 a, Word96 b) { return a.v == b.v; }
    friend constexpr bool operator!=(Word96 a, Word96 b) { return a.v != b.v; }

    // xor / or are carry-free; + and - wrap mod 2^96.
    friend constexpr Word96 operator^(Word96 a, Word96 b) { return Word96{a.v ^ b.v}; }
    friend constexpr Word96 operator|(Word96 a, Word96 b) { return Word96{a.v | b.v}; }
    friend constexpr Word96 operator+(Word96 a, Word96 b) { return Word96{(a.v + b.v) & mask()}; }
    friend constexpr Word96 operator-(Word96 a, Word96 b) { return Word96{(a.v - b.v) & mask()}; }
};

constexpr Word96 add_mod(Word96 a, Word96 b) { return a + b; }
constexpr Word96 sub_mod(Word96 a, Word96 b) { return a - b; }

constexpr unsigned hamming_weight(Word96 a) {
    return unsigned(__builtin_popcountll(uint64_t(a.v)) +
                    __builtin_popcountll(uint64_t(a.v >> 64)));
}

// Circular left rotation by r in [0, 96). A shift by the full width is UB on
// most ISAs, so r = 0 (the degenerate case the attack exploits) short-circuits.
constexpr Word96 rot_by(Word96 a, unsigned r) {
    r %= kWidth;
    if (r == 0) return a;
    return Word96{((a.v << r) | (a.v >> (kWidth - r))) & Word96::mask()};
}

constexpr unsigned rot_amount(Word96 b, RotationVariant variant) {
    return variant == RotationVariant::Modular ? unsigned(b.v % kWidth)
                                               : hamming_weight(b);
}

constexpr Word96 rot(Word96 a, Word96 b, RotationVariant variant) {
    return rot_by(a, rot_amount(b, variant));
}

// a mod n as a plain integer; n is an attack modulus, never a word width.
inline uint64_t mod_small(Word96 a, uint64_t n) {
    if (n < 2) throw std::invalid_argument("mod_small: modulus must be >= 2");
    return uint64_t(a.v % n);
}

// Canonical rendering: exactly 24 lowercase hex digits, most-significant first.
std::string to_hex(Word96 a);
// Accepts exactly 24 hex digits (either case); anything else throws.
Word96 from_hex(std::string_view s);

}  // namespace sasi
