#include "sasi/word96.hpp"

namespace sasi {

std::string to_hex(Word96 a) {
    static const char* digits = "0123456789abcdef";
    std::string s(24, '0');
    u128 v = a.v;
    for (int i = 23; i >= 0; --i) {
        s[size_t(i)] = digits[unsigned(v & 0xF)];
        v >>= 4;
    }
    return s;
}

Word96 from_hex(std::string_view s) {
    if (s.size() != 24) throw std::invalid_argument("from_hex: expected 24 hex digits");
    u128 v = 0;
    for (char c : s) {
        unsigned d;
        if (c >= '0' && c <= '9') d = unsigned(c - '0');
        else if (c >= 'a' && c <= 'f') d = unsigned(c - 'a') + 10;
        else if (c >= 'A' && c <= 'F') d = unsigned(c - 'A') + 10;
        else throw std::invalid_argument("from_hex: invalid hex digit");
        v = (v << 4) | d;
    }
    return Word96{v};
}

}  // namespace sasi
