#include <random>

#include "doctest.h"
#include "ecid/bigint.hpp"
#include "ecid/entropy.hpp"
#include "ecid/rational.hpp"
#include "ecid/sha256.hpp"

using namespace ecid;

namespace {

// Random Uint of up to `max_limbs` 64-bit words, biased toward edge patterns.
Uint random_uint(std::mt19937_64& rng, int max_limbs) {
    std::uniform_int_distribution<int> limbs_dist(0, max_limbs);
    std::uniform_int_distribution<int> kind(0, 3);
    int n = limbs_dist(rng);
    std::vector<std::uint64_t> limbs;
    for (int i = 0; i < n; ++i) {
        switch (kind(rng)) {
            case 0: limbs.push_back(rng()); break;
            case 1: limbs.push_back(~std::uint64_t(0)); break;
            case 2: limbs.push_back(0); break;
            default: limbs.push_back(1); break;
        }
    }
    return Uint::from_limbs(std::move(limbs));
}

std::string hex_of(std::span<const std::uint8_t> bytes) {
    static const char* d = "0123456789abcdef";
    std::string s;
    for (auto b : bytes) {
        s.push_back(d[b >> 4]);
        s.push_back(d[b & 0xF]);
    }
    return s;
}

}  // namespace

TEST_CASE("uint basic arithmetic and literals") {
    CHECK(Uint::from_string("0x11") == Uint(17));
    CHECK(Uint::from_string("123456789012345678901234567890").to_dec() ==
          "123456789012345678901234567890");
    CHECK(Uint::from_hex("ffffffffffffffffffffffffffffffff").bit_length() == 128);
    CHECK(Uint(0).to_dec() == "0");
    CHECK(Uint(0).to_hex() == "0x0");
    CHECK((Uint(7) + Uint(9)).low_u64() == 16);
    CHECK((Uint::from_hex("ffffffffffffffff") + Uint(1)).to_hex() == "0x10000000000000000");
    CHECK_THROWS_AS(Uint(3).sub(Uint(5)), MathError);
    CHECK_THROWS_AS(Uint(3).divmod(Uint(0)), MathError);
}

TEST_CASE("uint divmod satisfies the division identity on random operands") {
    std::mt19937_64 rng(0xec1d);
    for (int iter = 0; iter < 20000; ++iter) {
        Uint a = random_uint(rng, 6);
        Uint b = random_uint(rng, 4);
        if (b.is_zero()) continue;
        auto [q, r] = a.divmod(b);
        CHECK(r < b);
        CHECK(q * b + r == a);
    }
}

TEST_CASE("uint multiplication and addition are consistent") {
    std::mt19937_64 rng(0xfeed);
    for (int iter = 0; iter < 5000; ++iter) {
        Uint a = random_uint(rng, 4);
        Uint b = random_uint(rng, 4);
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK((a + b) - b == a);
        // distributivity spot check
        Uint c = random_uint(rng, 2);
        CHECK(a * (b + c) == a * b + a * c);
    }
}

TEST_CASE("uint shifts, truncation and bytes round-trip") {
    std::mt19937_64 rng(42);
    for (int iter = 0; iter < 2000; ++iter) {
        Uint a = random_uint(rng, 4);
        std::size_t s = rng() % 130;
        CHECK(a.shl(s).shr(s) == a);
        CHECK(a.trunc(16) == a.mod(Uint(1).shl(16)));
        std::size_t width = (a.bit_length() + 7) / 8 + rng() % 3;
        if (width == 0) width = 1;
        auto bytes = a.to_bytes_be(width);
        CHECK(Uint::from_bytes_be(bytes) == a);
    }
    CHECK_THROWS_AS(Uint(256).to_bytes_be(1), MathError);
}

TEST_CASE("powmod matches repeated multiplication") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 300; ++iter) {
        Uint m = random_uint(rng, 2);
        if (m <= Uint(1)) continue;
        Uint b = random_uint(rng, 2);
        std::uint64_t e = rng() % 50;
        Uint expect(1);
        for (std::uint64_t i = 0; i < e; ++i) expect = mulmod(expect, b, m);
        CHECK(powmod(b, Uint(e), m) == expect);
    }
}

TEST_CASE("primality classifies small integers exhaustively") {
    auto naive = [](std::uint64_t n) {
        if (n < 2) return false;
        for (std::uint64_t d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    };
    for (std::uint64_t n = 0; n < 2000; ++n) CHECK(is_probable_prime(Uint(n)) == naive(n));
    CHECK(is_probable_prime(Uint::from_string("0xffffffffffffffffffffffffffffffff8f")));  // 2^136 - 113
    CHECK(!is_probable_prime(Uint::from_string("0xffffffffffffffffffffffffffffffff61")));
}

TEST_CASE("rational arithmetic is exact") {
    Rational half(Uint(1), Uint(2));
    Rational third(Uint(1), Uint(3));
    CHECK((half + third).to_string() == "5/6");
    CHECK((half - third).to_string() == "1/6");
    CHECK((third - half).to_string() == "-1/6");
    CHECK((half * third).to_string() == "1/6");
    CHECK((half / third).to_string() == "3/2");
    CHECK(Rational(Uint(6), Uint(4)).to_string() == "3/2");
    CHECK(Rational(Uint(0), Uint(7)) == Rational());
    CHECK((third - half).abs() == Rational(Uint(1), Uint(6)));
    CHECK(Rational(Uint(1), Uint(3)) < Rational(Uint(1), Uint(2)));
    CHECK(Rational(Uint(1), Uint(2), true) < Rational());
    CHECK_THROWS_AS(Rational(Uint(1), Uint(0)), MathError);
}

TEST_CASE("sha256 matches the standard test vectors") {
    auto dig = [](const std::string& s) {
        std::vector<std::uint8_t> in(s.begin(), s.end());
        return hex_of(Sha256::digest(in));
    };
    CHECK(dig("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(dig("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(dig("The quick brown fox jumps over the lazy dog") ==
          "d7a8fbb307d7809469ca9abcb0082e4f8d5651e46d3cdb762d02d0bf37c9e592");
    // incremental == one-shot across block boundaries
    std::vector<std::uint8_t> data(200, 0xa5);
    Sha256 h;
    h.update(std::span<const std::uint8_t>(data.data(), 63));
    h.update(std::span<const std::uint8_t>(data.data() + 63, 137));
    CHECK(hex_of(h.finish()) == hex_of(Sha256::digest(data)));
}

TEST_CASE("seeded entropy replays and uniform sampling stays in range") {
    SeededEntropy a("seed-1"), b("seed-1"), c("seed-2");
    std::vector<std::uint8_t> ba(64), bb(64), bc(64);
    a.fill(ba);
    b.fill(bb);
    c.fill(bc);
    CHECK(ba == bb);
    CHECK(ba != bc);

    SeededEntropy rng("range");
    const Uint bound(19);
    bool saw_low = false, saw_high = false;
    for (int i = 0; i < 2000; ++i) {
        Uint v = uniform_below(rng, bound);
        CHECK(v < bound);
        if (v.is_zero()) saw_low = true;
        if (v == Uint(18)) saw_high = true;
    }
    CHECK(saw_low);
    CHECK(saw_high);
    for (int i = 0; i < 500; ++i) {
        Uint v = uniform_nonzero_below(rng, Uint(19));
        CHECK(!v.is_zero());
        CHECK(v < Uint(19));
    }
    // singleton range {1}
    CHECK(uniform_nonzero_below(rng, Uint(2)) == Uint(1));
}
