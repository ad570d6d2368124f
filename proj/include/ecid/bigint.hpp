#pragma once

// Arbitrary-precision unsigned integers on 64-bit limbs.
//
// Sizes in this project range from single-limb toy moduli to a few hundred
// bits for production curves, so schoolbook multiplication and Knuth
// division are entirely adequate. Nothing here is constant-time; see the
// project README before using any of this near a real adversary.

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ecid {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class MathError : public Error {
public:
    explicit MathError(const std::string& what) : Error(what) {}
};

class Uint {
public:
    Uint() = default;
    Uint(std::uint64_t v) {  // NOLINT: implicit by design, mirrors integer literals
        if (v != 0) limbs_.push_back(v);
    }

    static Uint from_limbs(std::vector<std::uint64_t> limbs) {
        Uint r;
        r.limbs_ = std::move(limbs);
        r.trim();
        return r;
    }

    // Parses "0x..." as hex, plain digits as decimal.
    static Uint from_string(std::string_view s) {
        if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
            return from_hex(s.substr(2));
        return from_dec(s);
    }

    static Uint from_hex(std::string_view s) {
        if (s.empty()) throw MathError("empty hex literal");
        Uint r;
        for (char c : s) {
            int d;
            if (c >= '0' && c <= '9') d = c - '0';
            else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
            else throw MathError("bad hex digit in literal");
            r = r.shl(4);
            r = r.add(Uint(static_cast<std::uint64_t>(d)));
        }
        return r;
    }

    static Uint from_dec(std::string_view s) {
        if (s.empty()) throw MathError("empty decimal literal");
        Uint r;
        for (char c : s) {
            if (c < '0' || c > '9') throw MathError("bad decimal digit in literal");
            r = r.mul_small(10).add(Uint(static_cast<std::uint64_t>(c - '0')));
        }
        return r;
    }

    static Uint from_bytes_be(std::span<const std::uint8_t> bytes) {
        Uint r;
        for (std::uint8_t b : bytes) r = r.shl(8).add(Uint(b));
        return r;
    }

    bool is_zero() const { return limbs_.empty(); }
    bool is_odd() const { return !limbs_.empty() && (limbs_[0] & 1); }

    std::size_t bit_length() const {
        if (limbs_.empty()) return 0;
        std::size_t top = 64;
        std::uint64_t w = limbs_.back();
        while (!(w >> 63)) { w <<= 1; --top; }
        return (limbs_.size() - 1) * 64 + top;
    }

    bool bit(std::size_t i) const {
        std::size_t limb = i / 64;
        if (limb >= limbs_.size()) return false;
        return (limbs_[limb] >> (i % 64)) & 1;
    }

    std::uint64_t low_u64() const { return limbs_.empty() ? 0 : limbs_[0]; }

    int compare(const Uint& o) const {
        if (limbs_.size() != o.limbs_.size())
            return limbs_.size() < o.limbs_.size() ? -1 : 1;
        for (std::size_t i = limbs_.size(); i-- > 0;) {
            if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i] ? -1 : 1;
        }
        return 0;
    }

    bool operator==(const Uint& o) const { return limbs_ == o.limbs_; }
    bool operator!=(const Uint& o) const { return limbs_ != o.limbs_; }
    bool operator<(const Uint& o) const { return compare(o) < 0; }
    bool operator<=(const Uint& o) const { return compare(o) <= 0; }
    bool operator>(const Uint& o) const { return compare(o) > 0; }
    bool operator>=(const Uint& o) const { return compare(o) >= 0; }

    Uint add(const Uint& o) const {
        Uint r;
        const std::size_t n = std::max(limbs_.size(), o.limbs_.size());
        r.limbs_.reserve(n + 1);
        unsigned __int128 carry = 0;
        for (std::size_t i = 0; i < n; ++i) {
            unsigned __int128 s = carry;
            if (i < limbs_.size()) s += limbs_[i];
            if (i < o.limbs_.size()) s += o.limbs_[i];
            r.limbs_.push_back(static_cast<std::uint64_t>(s));
            carry = s >> 64;
        }
        if (carry) r.limbs_.push_back(static_cast<std::uint64_t>(carry));
        return r;
    }

    // Requires *this >= o.
    Uint sub(const Uint& o) const {
        if (compare(o) < 0) throw MathError("Uint::sub underflow");
        Uint r;
        r.limbs_.reserve(limbs_.size());
        std::uint64_t borrow = 0;
        for (std::size_t i = 0; i < limbs_.size(); ++i) {
            std::uint64_t rhs = i < o.limbs_.size() ? o.limbs_[i] : 0;
            std::uint64_t t = limbs_[i] - rhs;
            std::uint64_t b2 = limbs_[i] < rhs;
            std::uint64_t t2 = t - borrow;
            b2 |= t < borrow;
            r.limbs_.push_back(t2);
            borrow = b2;
        }
        r.trim();
        return r;
    }

    Uint mul(const Uint& o) const {
        if (is_zero() || o.is_zero()) return Uint();
        Uint r;
        r.limbs_.assign(limbs_.size() + o.limbs_.size(), 0);
        for (std::size_t i = 0; i < limbs_.size(); ++i) {
            unsigned __int128 carry = 0;
            for (std::size_t j = 0; j < o.limbs_.size(); ++j) {
                unsigned __int128 cur = r.limbs_[i + j];
                cur += static_cast<unsigned __int128>(limbs_[i]) * o.limbs_[j];
                cur += carry;
                r.limbs_[i + j] = static_cast<std::uint64_t>(cur);
                carry = cur >> 64;
            }
            r.limbs_[i + o.limbs_.size()] = static_cast<std::uint64_t>(carry);
        }
        r.trim();
        return r;
    }

    Uint mul_small(std::uint64_t m) const {
        if (m == 0 || is_zero()) return Uint();
        Uint r;
        r.limbs_.reserve(limbs_.size() + 1);
        unsigned __int128 carry = 0;
        for (std::uint64_t w : limbs_) {
            unsigned __int128 cur = static_cast<unsigned __int128>(w) * m + carry;
            r.limbs_.push_back(static_cast<std::uint64_t>(cur));
            carry = cur >> 64;
        }
        if (carry) r.limbs_.push_back(static_cast<std::uint64_t>(carry));
        return r;
    }

    Uint shl(std::size_t bits) const {
        if (is_zero() || bits == 0) return *this;
        const std::size_t words = bits / 64, rem = bits % 64;
        Uint r;
        r.limbs_.assign(words, 0);
        if (rem == 0) {
            r.limbs_.insert(r.limbs_.end(), limbs_.begin(), limbs_.end());
        } else {
            std::uint64_t carry = 0;
            for (std::uint64_t w : limbs_) {
                r.limbs_.push_back((w << rem) | carry);
                carry = w >> (64 - rem);
            }
            if (carry) r.limbs_.push_back(carry);
        }
        return r;
    }

    Uint shr(std::size_t bits) const {
        const std::size_t words = bits / 64, rem = bits % 64;
        if (words >= limbs_.size()) return Uint();
        Uint r;
        r.limbs_.assign(limbs_.begin() + static_cast<std::ptrdiff_t>(words), limbs_.end());
        if (rem != 0) {
            for (std::size_t i = 0; i < r.limbs_.size(); ++i) {
                r.limbs_[i] >>= rem;
                if (i + 1 < r.limbs_.size())
                    r.limbs_[i] |= r.limbs_[i + 1] << (64 - rem);
            }
        }
        r.trim();
        return r;
    }

    Uint xor_with(const Uint& o) const {
        Uint r;
        const std::size_t n = std::max(limbs_.size(), o.limbs_.size());
        r.limbs_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t a = i < limbs_.size() ? limbs_[i] : 0;
            std::uint64_t b = i < o.limbs_.size() ? o.limbs_[i] : 0;
            r.limbs_.push_back(a ^ b);
        }
        r.trim();
        return r;
    }

    // Keeps the k low bits.
    Uint trunc(std::size_t k) const {
        const std::size_t words = k / 64, rem = k % 64;
        if (words >= limbs_.size()) return *this;
        Uint r;
        r.limbs_.assign(limbs_.begin(), limbs_.begin() + static_cast<std::ptrdiff_t>(words));
        if (rem != 0) {
            std::uint64_t mask = (std::uint64_t(1) << rem) - 1;
            r.limbs_.push_back(limbs_[words] & mask);
        }
        r.trim();
        return r;
    }

    struct DivMod;

    // Knuth algorithm D. Throws on division by zero.
    DivMod divmod(const Uint& d) const;
    Uint mod(const Uint& m) const;
    Uint div(const Uint& m) const;

    std::string to_hex() const {
        if (is_zero()) return "0x0";
        static const char* digits = "0123456789abcdef";
        std::string s;
        for (std::size_t i = limbs_.size(); i-- > 0;) {
            for (int nib = 15; nib >= 0; --nib) {
                int d = static_cast<int>((limbs_[i] >> (nib * 4)) & 0xF);
                if (s.empty() && d == 0) continue;
                s.push_back(digits[d]);
            }
        }
        return "0x" + s;
    }

    std::string to_dec() const;

    // Fixed-width big-endian serialization; throws if the value does not fit.
    std::vector<std::uint8_t> to_bytes_be(std::size_t width) const {
        if (bit_length() > width * 8) throw MathError("value too large for byte width");
        std::vector<std::uint8_t> out(width, 0);
        for (std::size_t i = 0; i < width; ++i) {
            std::size_t limb = i / 8;
            if (limb < limbs_.size())
                out[width - 1 - i] = static_cast<std::uint8_t>(limbs_[limb] >> ((i % 8) * 8));
        }
        return out;
    }

private:
    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    }

    std::vector<std::uint64_t> limbs_;  // little-endian, canonical
};

struct Uint::DivMod {
    Uint quot;
    Uint rem;
};

inline Uint::DivMod Uint::divmod(const Uint& d) const {
    if (d.is_zero()) throw MathError("division by zero");
    if (compare(d) < 0) return {Uint(), *this};
    if (d.limbs_.size() == 1) {
        Uint q;
        q.limbs_.assign(limbs_.size(), 0);
        unsigned __int128 rem = 0;
        for (std::size_t i = limbs_.size(); i-- > 0;) {
            unsigned __int128 cur = (rem << 64) | limbs_[i];
            q.limbs_[i] = static_cast<std::uint64_t>(cur / d.limbs_[0]);
            rem = cur % d.limbs_[0];
        }
        q.trim();
        return {q, Uint(static_cast<std::uint64_t>(rem))};
    }

    // Normalize so the divisor's top limb has its high bit set.
    const std::size_t shift = 64 - (d.bit_length() % 64 == 0 ? 64 : d.bit_length() % 64);
    Uint u = shl(shift), v = d.shl(shift);
    const std::size_t n = v.limbs_.size();
    const std::size_t m = u.limbs_.size() - n;
    u.limbs_.push_back(0);

    Uint q;
    q.limbs_.assign(m + 1, 0);
    const std::uint64_t vtop = v.limbs_[n - 1];
    const std::uint64_t vsecond = v.limbs_[n - 2];

    for (std::size_t j = m + 1; j-- > 0;) {
        unsigned __int128 num =
            (static_cast<unsigned __int128>(u.limbs_[j + n]) << 64) | u.limbs_[j + n - 1];
        unsigned __int128 qhat = num / vtop;
        unsigned __int128 rhat = num % vtop;
        while (qhat >> 64 || qhat * vsecond > ((rhat << 64) | u.limbs_[j + n - 2])) {
            --qhat;
            rhat += vtop;
            if (rhat >> 64) break;
        }
        // Multiply-subtract qhat*v from u[j..j+n].
        unsigned __int128 borrow = 0, carry = 0;
        for (std::size_t i = 0; i < n; ++i) {
            unsigned __int128 p = qhat * v.limbs_[i] + carry;
            carry = p >> 64;
            std::uint64_t plo = static_cast<std::uint64_t>(p);
            std::uint64_t ui = u.limbs_[j + i];
            std::uint64_t t = ui - plo;
            std::uint64_t b = ui < plo;
            std::uint64_t t2 = t - static_cast<std::uint64_t>(borrow);
            b += t < static_cast<std::uint64_t>(borrow);
            u.limbs_[j + i] = t2;
            borrow = b;
        }
        unsigned __int128 top = static_cast<unsigned __int128>(u.limbs_[j + n]) - carry - borrow;
        u.limbs_[j + n] = static_cast<std::uint64_t>(top);
        if (top >> 64) {
            // qhat was one too large: add v back once.
            --qhat;
            unsigned __int128 c2 = 0;
            for (std::size_t i = 0; i < n; ++i) {
                unsigned __int128 s =
                    static_cast<unsigned __int128>(u.limbs_[j + i]) + v.limbs_[i] + c2;
                u.limbs_[j + i] = static_cast<std::uint64_t>(s);
                c2 = s >> 64;
            }
            u.limbs_[j + n] += static_cast<std::uint64_t>(c2);
        }
        q.limbs_[j] = static_cast<std::uint64_t>(qhat);
    }
    q.trim();
    u.limbs_.resize(n);
    u.trim();
    return {q, u.shr(shift)};
}

inline Uint Uint::mod(const Uint& m) const { return divmod(m).rem; }
inline Uint Uint::div(const Uint& m) const { return divmod(m).quot; }

inline std::string Uint::to_dec() const {
    if (is_zero()) return "0";
    std::string s;
    Uint t = *this;
    const Uint ten(10);
    while (!t.is_zero()) {
        auto [q, r] = t.divmod(ten);
        s.push_back(static_cast<char>('0' + r.low_u64()));
        t = q;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

inline Uint operator+(const Uint& a, const Uint& b) { return a.add(b); }
inline Uint operator-(const Uint& a, const Uint& b) { return a.sub(b); }
inline Uint operator*(const Uint& a, const Uint& b) { return a.mul(b); }
inline Uint operator%(const Uint& a, const Uint& b) { return a.mod(b); }
inline Uint operator/(const Uint& a, const Uint& b) { return a.div(b); }

inline Uint addmod(const Uint& a, const Uint& b, const Uint& m) { return a.add(b).mod(m); }

inline Uint submod(const Uint& a, const Uint& b, const Uint& m) {
    Uint ar = a.mod(m), br = b.mod(m);
    if (ar >= br) return ar.sub(br);
    return m.sub(br.sub(ar));
}

inline Uint mulmod(const Uint& a, const Uint& b, const Uint& m) { return a.mul(b).mod(m); }

inline Uint powmod(const Uint& base, const Uint& exp, const Uint& m) {
    if (m.is_zero()) throw MathError("powmod with zero modulus");
    if (m == Uint(1)) return Uint();
    Uint result(1), b = base.mod(m);
    const std::size_t nbits = exp.bit_length();
    for (std::size_t i = nbits; i-- > 0;) {
        result = mulmod(result, result, m);
        if (exp.bit(i)) result = mulmod(result, b, m);
    }
    return result;
}

inline Uint gcd(Uint a, Uint b) {
    while (!b.is_zero()) {
        Uint r = a.mod(b);
        a = b;
        b = r;
    }
    return a;
}

// Miller-Rabin with the first twelve prime bases; deterministic below 3.3e24,
// overwhelming confidence at our parameter sizes.
inline bool is_probable_prime(const Uint& n) {
    static const std::uint64_t small_primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (n < Uint(2)) return false;
    for (std::uint64_t p : small_primes) {
        if (n == Uint(p)) return true;
        if (n.mod(Uint(p)).is_zero()) return false;
    }
    Uint d = n.sub(Uint(1));
    std::size_t r = 0;
    while (!d.is_odd()) {
        d = d.shr(1);
        ++r;
    }
    const Uint n1 = n.sub(Uint(1));
    for (std::uint64_t a : small_primes) {
        Uint x = powmod(Uint(a), d, n);
        if (x == Uint(1) || x == n1) continue;
        bool composite = true;
        for (std::size_t i = 1; i < r; ++i) {
            x = mulmod(x, x, n);
            if (x == n1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

}  // namespace ecid
