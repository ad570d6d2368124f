#pragma once

// A bit-string of explicit length. Bit i of `value` is the i-th symbol, so
// the integer sigma(tau) = sum tau_i 2^i is just `value`. Rendering is
// most-significant bit first.

#include <string>
#include <vector>

#include "ecid/bigint.hpp"

namespace ecid {

struct Bits {
    Uint value;
    std::size_t count = 0;

    static Bits make(Uint v, std::size_t count) {
        if (v.bit_length() > count) throw MathError("bit-string value wider than its length");
        return {std::move(v), count};
    }

    bool operator==(const Bits& o) const { return value == o.value && count == o.count; }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = count; i-- > 0;) s.push_back(value.bit(i) ? '1' : '0');
        return s;
    }

    // Big-endian, ceil(count/8) bytes.
    std::vector<std::uint8_t> to_bytes() const { return value.to_bytes_be((count + 7) / 8); }
};

}  // namespace ecid
