#pragma once

// Field arithmetic for the three coordinate fields the curve models use:
//   F_p       (odd prime p)            -> FieldElement
//   F_{2^m}   (polynomial basis)       -> Gf2mElement
//   F_{p^n}   (fixed polynomial basis) -> ExtFieldElement
//
// Elements carry their field parameters, so every operation can reject
// cross-field mixups explicitly. All operations are pure.

#include <memory>
#include <optional>
#include <vector>

#include "ecid/bigint.hpp"

namespace ecid {

class FieldError : public Error {
public:
    explicit FieldError(const std::string& what) : Error(what) {}
};

// ---------------------------------------------------------------------------
// F_p

struct FieldElement {
    Uint value;    // canonical representative in [0, p)
    Uint modulus;  // odd prime

    bool operator==(const FieldElement& o) const { return value == o.value && modulus == o.modulus; }
};

inline FieldElement fp_make(Uint v, const Uint& p) {
    if (p < Uint(3) || !p.is_odd()) throw FieldError("prime field modulus must be an odd prime >= 3");
    return {v.mod(p), p};
}

namespace detail {
inline void require_same_modulus(const FieldElement& a, const FieldElement& b) {
    if (a.modulus != b.modulus) throw FieldError("field modulus mismatch");
}
}  // namespace detail

inline FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    detail::require_same_modulus(a, b);
    return {addmod(a.value, b.value, a.modulus), a.modulus};
}

inline FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    detail::require_same_modulus(a, b);
    return {submod(a.value, b.value, a.modulus), a.modulus};
}

inline FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    detail::require_same_modulus(a, b);
    return {mulmod(a.value, b.value, a.modulus), a.modulus};
}

inline FieldElement fp_neg(const FieldElement& a) {
    return {a.value.is_zero() ? Uint() : a.modulus.sub(a.value), a.modulus};
}

inline FieldElement fp_pow(const FieldElement& a, const Uint& e) {
    return {powmod(a.value, e, a.modulus), a.modulus};
}

// Fermat inversion; valid because the modulus is prime.
inline FieldElement fp_inv(const FieldElement& a) {
    if (a.value.is_zero()) throw FieldError("inversion of zero in F_p");
    return fp_pow(a, a.modulus.sub(Uint(2)));
}

inline FieldElement operator/(const FieldElement& a, const FieldElement& b) {
    detail::require_same_modulus(a, b);
    return a * fp_inv(b);
}

// chi(a) = a^((q-1)/2): +1 for nonzero squares, -1 for non-squares, 0 at zero.
inline int quad_char(const FieldElement& a) {
    if (a.value.is_zero()) return 0;
    Uint r = powmod(a.value, a.modulus.sub(Uint(1)).shr(1), a.modulus);
    if (r == Uint(1)) return 1;
    if (r == a.modulus.sub(Uint(1))) return -1;
    throw FieldError("quadratic character undefined: modulus is not prime");
}

// Square root as a^((q+1)/4); requires q = 3 (mod 4). Returns nullopt for
// non-residues; the result for residues is exactly the (q+1)/4 power.
inline std::optional<FieldElement> fp_sqrt(const FieldElement& a) {
    if (a.modulus.mod(Uint(4)) != Uint(3)) throw FieldError("fp_sqrt requires q = 3 (mod 4)");
    if (a.value.is_zero()) return FieldElement{Uint(), a.modulus};
    FieldElement r = fp_pow(a, a.modulus.add(Uint(1)).shr(2));
    if (r * r == a) return r;
    return std::nullopt;
}

// Cube root as a^((2q-1)/3); requires q = 2 (mod 3), where cubing is a bijection.
inline FieldElement fp_cbrt(const FieldElement& a) {
    if (a.modulus.mod(Uint(3)) != Uint(2)) throw FieldError("fp_cbrt requires q = 2 (mod 3)");
    return fp_pow(a, a.modulus.mul_small(2).sub(Uint(1)).div(Uint(3)));
}

// ---------------------------------------------------------------------------
// F_{2^m}, polynomial basis modulo a fixed irreducible reduction polynomial.
// Bit i of `bits` is the coefficient of z^i.

struct Gf2mElement {
    Uint bits;
    Uint reduction;  // degree-m irreducible, bit m set

    bool operator==(const Gf2mElement& o) const { return bits == o.bits && reduction == o.reduction; }
};

namespace detail {
inline void require_same_reduction(const Gf2mElement& a, const Gf2mElement& b) {
    if (a.reduction != b.reduction) throw FieldError("binary field reduction polynomial mismatch");
}

inline Uint gf2_reduce(Uint t, const Uint& reduction) {
    const std::size_t m = reduction.bit_length() - 1;
    while (t.bit_length() > m) {
        t = t.xor_with(reduction.shl(t.bit_length() - 1 - m));
    }
    return t;
}
}  // namespace detail

inline std::size_t gf2m_degree_bound(const Gf2mElement& a) { return a.reduction.bit_length() - 1; }

inline Gf2mElement gf2m_make(const Uint& bits, const Uint& reduction) {
    if (reduction.bit_length() < 2) throw FieldError("reduction polynomial must have degree >= 1");
    return {detail::gf2_reduce(bits, reduction), reduction};
}

// Addition and subtraction coincide: bitwise XOR.
inline Gf2mElement operator+(const Gf2mElement& a, const Gf2mElement& b) {
    detail::require_same_reduction(a, b);
    return {a.bits.xor_with(b.bits), a.reduction};
}

inline Gf2mElement operator*(const Gf2mElement& a, const Gf2mElement& b) {
    detail::require_same_reduction(a, b);
    Uint acc;
    const std::size_t nbits = b.bits.bit_length();
    for (std::size_t i = 0; i < nbits; ++i) {
        if (b.bits.bit(i)) acc = acc.xor_with(a.bits.shl(i));
    }
    return {detail::gf2_reduce(acc, a.reduction), a.reduction};
}

inline Gf2mElement gf2m_pow(const Gf2mElement& a, const Uint& e) {
    Gf2mElement result{Uint(1), a.reduction};
    Gf2mElement base = a;
    for (std::size_t i = e.bit_length(); i-- > 0;) {
        result = result * result;
        if (e.bit(i)) result = result * base;
    }
    return result;
}

inline Gf2mElement gf2m_inv(const Gf2mElement& a) {
    if (a.bits.is_zero()) throw FieldError("inversion of zero in F_{2^m}");
    const std::size_t m = gf2m_degree_bound(a);
    return gf2m_pow(a, Uint(1).shl(m).sub(Uint(2)));
}

inline Gf2mElement operator/(const Gf2mElement& a, const Gf2mElement& b) {
    detail::require_same_reduction(a, b);
    return a * gf2m_inv(b);
}

// Squaring is a field automorphism in characteristic 2, so every element has
// the unique square root a^(2^(m-1)).
inline Gf2mElement gf2m_sqrt(const Gf2mElement& a) {
    const std::size_t m = gf2m_degree_bound(a);
    return gf2m_pow(a, Uint(1).shl(m - 1));
}

// Absolute trace Tr(a) = a + a^2 + ... + a^(2^(m-1)), in {0, 1}.
inline int gf2m_trace(const Gf2mElement& a) {
    const std::size_t m = gf2m_degree_bound(a);
    Gf2mElement acc = a, sq = a;
    for (std::size_t i = 1; i < m; ++i) {
        sq = sq * sq;
        acc = acc + sq;
    }
    if (acc.bits.is_zero()) return 0;
    if (acc.bits == Uint(1)) return 1;
    throw FieldError("trace landed outside GF(2): reduction polynomial is not irreducible");
}

// ---------------------------------------------------------------------------
// Irreducibility of monic polynomials over F_p (Rabin's test). Shared by the
// binary reduction polynomial check (p = 2) and the extension field defining
// polynomial check.

namespace detail {

using Poly = std::vector<Uint>;  // coeff[i] is the coefficient of x^i; no trailing zeros

inline Poly poly_trim(Poly f) {
    while (!f.empty() && f.back().is_zero()) f.pop_back();
    return f;
}

inline Poly poly_mod(Poly a, const Poly& f, const Uint& p) {
    a = poly_trim(std::move(a));
    const Poly fn = poly_trim(f);
    if (fn.empty()) throw FieldError("polynomial modulus is zero");
    const Uint lead_inv = powmod(fn.back(), p.sub(Uint(2)), p);
    while (a.size() >= fn.size()) {
        Uint factor = mulmod(a.back(), lead_inv, p);
        std::size_t shift = a.size() - fn.size();
        for (std::size_t i = 0; i < fn.size(); ++i) {
            a[shift + i] = submod(a[shift + i], mulmod(factor, fn[i], p), p);
        }
        a = poly_trim(std::move(a));
        if (a.empty()) break;
    }
    return a;
}

inline Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, const Uint& p) {
    if (a.empty() || b.empty()) return {};
    Poly prod(a.size() + b.size() - 1, Uint());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            prod[i + j] = addmod(prod[i + j], mulmod(a[i], b[j], p), p);
    return poly_mod(std::move(prod), f, p);
}

// x^e mod f over F_p.
inline Poly poly_pow_x(const Uint& e, const Poly& f, const Uint& p) {
    Poly result{Uint(1)};
    Poly base = poly_mod(Poly{Uint(), Uint(1)}, f, p);
    for (std::size_t i = e.bit_length(); i-- > 0;) {
        result = poly_mulmod(result, result, f, p);
        if (e.bit(i)) result = poly_mulmod(result, base, f, p);
    }
    return result;
}

inline Poly poly_gcd(Poly a, Poly b, const Uint& p) {
    a = poly_trim(std::move(a));
    b = poly_trim(std::move(b));
    while (!b.empty()) {
        Poly r = poly_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

inline Poly poly_sub(Poly a, const Poly& b, const Uint& p) {
    if (a.size() < b.size()) a.resize(b.size(), Uint());
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = submod(a[i], b[i], p);
    return poly_trim(std::move(a));
}

}  // namespace detail

// Rabin: monic f of degree n is irreducible over F_p iff x^(p^n) = x (mod f)
// and gcd(x^(p^(n/d)) - x, f) = 1 for every prime divisor d of n.
inline bool poly_is_irreducible(const std::vector<Uint>& f, const Uint& p) {
    using namespace detail;
    const Poly fn = poly_trim(f);
    if (fn.size() < 2) return false;
    const std::size_t n = fn.size() - 1;
    if (n == 1) return true;

    Uint pn(1);
    for (std::size_t i = 0; i < n; ++i) pn = pn.mul(p);
    const Poly x{Uint(), Uint(1)};

    Poly xq = poly_pow_x(pn, fn, p);
    if (!poly_sub(xq, x, p).empty()) return false;

    std::vector<std::size_t> prime_divisors;
    std::size_t rem = n;
    for (std::size_t d = 2; d * d <= rem; ++d) {
        if (rem % d != 0) continue;
        prime_divisors.push_back(d);
        while (rem % d == 0) rem /= d;
    }
    if (rem > 1) prime_divisors.push_back(rem);

    for (std::size_t d : prime_divisors) {
        Uint pk(1);
        for (std::size_t i = 0; i < n / d; ++i) pk = pk.mul(p);
        Poly g = poly_gcd(poly_sub(poly_pow_x(pk, fn, p), x, p), fn, p);
        if (g.size() != 1) return false;
    }
    return true;
}

inline bool gf2_poly_is_irreducible(const Uint& reduction) {
    std::vector<Uint> coeffs;
    for (std::size_t i = 0; i < reduction.bit_length(); ++i)
        coeffs.push_back(reduction.bit(i) ? Uint(1) : Uint());
    return poly_is_irreducible(coeffs, Uint(2));
}

// ---------------------------------------------------------------------------
// F_{p^n} with the fixed polynomial basis {1, alpha, ..., alpha^(n-1)}, alpha
// a root of the monic defining polynomial x^n + c_{n-1} x^(n-1) + ... + c_0.

struct ExtFieldBasis {
    Uint p;                      // base prime
    std::vector<Uint> defining;  // c_0 ... c_{n-1}; degree n = defining.size()

    std::size_t degree() const { return defining.size(); }

    Uint size() const {  // q = p^n
        Uint q(1);
        for (std::size_t i = 0; i < degree(); ++i) q = q.mul(p);
        return q;
    }

    bool operator==(const ExtFieldBasis& o) const { return p == o.p && defining == o.defining; }
};

inline std::shared_ptr<const ExtFieldBasis> make_ext_basis(Uint p, std::vector<Uint> defining) {
    if (p < Uint(3) || !is_probable_prime(p)) throw FieldError("extension base must be an odd prime");
    if (defining.empty()) throw FieldError("defining polynomial must have degree >= 1");
    std::vector<Uint> monic = defining;
    monic.push_back(Uint(1));
    if (!poly_is_irreducible(monic, p)) throw FieldError("defining polynomial is not irreducible over F_p");
    auto b = std::make_shared<ExtFieldBasis>();
    b->p = std::move(p);
    for (auto& c : defining) c = c.mod(b->p);
    b->defining = std::move(defining);
    return b;
}

struct ExtFieldElement {
    std::vector<Uint> coords;  // x_1 ... x_n against {1, alpha, ..., alpha^(n-1)}
    std::shared_ptr<const ExtFieldBasis> basis;

    bool operator==(const ExtFieldElement& o) const {
        return coords == o.coords && basis && o.basis && *basis == *o.basis;
    }
};

namespace detail {
inline void require_same_basis(const ExtFieldElement& a, const ExtFieldElement& b) {
    if (!a.basis || !b.basis || !(*a.basis == *b.basis))
        throw FieldError("extension field basis mismatch");
}
}  // namespace detail

inline ExtFieldElement fpn_make(std::vector<Uint> coords, std::shared_ptr<const ExtFieldBasis> basis) {
    if (coords.size() != basis->degree()) throw FieldError("coordinate count differs from extension degree");
    for (auto& c : coords) c = c.mod(basis->p);
    return {std::move(coords), std::move(basis)};
}

inline ExtFieldElement fpn_zero(std::shared_ptr<const ExtFieldBasis> basis) {
    return {std::vector<Uint>(basis->degree(), Uint()), std::move(basis)};
}

inline ExtFieldElement fpn_from_u64(std::uint64_t v, std::shared_ptr<const ExtFieldBasis> basis) {
    std::vector<Uint> c(basis->degree(), Uint());
    c[0] = Uint(v).mod(basis->p);
    return {std::move(c), std::move(basis)};
}

inline bool fpn_is_zero(const ExtFieldElement& a) {
    for (const auto& c : a.coords)
        if (!c.is_zero()) return false;
    return true;
}

// Coordinate projection (x_1, ..., x_n) in the fixed basis order.
inline std::vector<FieldElement> fpn_coords(const ExtFieldElement& a) {
    std::vector<FieldElement> out;
    out.reserve(a.coords.size());
    for (const auto& c : a.coords) out.push_back({c, a.basis->p});
    return out;
}

inline ExtFieldElement operator+(const ExtFieldElement& a, const ExtFieldElement& b) {
    detail::require_same_basis(a, b);
    std::vector<Uint> c(a.coords.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = addmod(a.coords[i], b.coords[i], a.basis->p);
    return {std::move(c), a.basis};
}

inline ExtFieldElement operator-(const ExtFieldElement& a, const ExtFieldElement& b) {
    detail::require_same_basis(a, b);
    std::vector<Uint> c(a.coords.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = submod(a.coords[i], b.coords[i], a.basis->p);
    return {std::move(c), a.basis};
}

inline ExtFieldElement fpn_neg(const ExtFieldElement& a) {
    std::vector<Uint> c(a.coords.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = submod(Uint(), a.coords[i], a.basis->p);
    return {std::move(c), a.basis};
}

inline ExtFieldElement operator*(const ExtFieldElement& a, const ExtFieldElement& b) {
    detail::require_same_basis(a, b);
    const auto& basis = *a.basis;
    const std::size_t n = basis.degree();
    const Uint& p = basis.p;
    std::vector<Uint> prod(2 * n - 1, Uint());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            prod[i + j] = addmod(prod[i + j], mulmod(a.coords[i], b.coords[j], p), p);
    // Fold alpha^n = -(c_{n-1} alpha^{n-1} + ... + c_0) from the top down.
    for (std::size_t d = 2 * n - 2; d >= n && d < prod.size(); --d) {
        Uint top = prod[d];
        if (!top.is_zero()) {
            prod[d] = Uint();
            for (std::size_t i = 0; i < n; ++i) {
                prod[d - n + i] = submod(prod[d - n + i], mulmod(top, basis.defining[i], p), p);
            }
        }
        if (d == n) break;
    }
    prod.resize(n);
    return {std::move(prod), a.basis};
}

inline ExtFieldElement fpn_pow(const ExtFieldElement& a, const Uint& e) {
    ExtFieldElement result = fpn_from_u64(1, a.basis);
    for (std::size_t i = e.bit_length(); i-- > 0;) {
        result = result * result;
        if (e.bit(i)) result = result * a;
    }
    return result;
}

inline ExtFieldElement fpn_inv(const ExtFieldElement& a) {
    if (fpn_is_zero(a)) throw FieldError("inversion of zero in F_{p^n}");
    return fpn_pow(a, a.basis->size().sub(Uint(2)));
}

inline ExtFieldElement operator/(const ExtFieldElement& a, const ExtFieldElement& b) {
    detail::require_same_basis(a, b);
    return a * fpn_inv(b);
}

inline int quad_char(const ExtFieldElement& a) {
    if (fpn_is_zero(a)) return 0;
    ExtFieldElement r = fpn_pow(a, a.basis->size().sub(Uint(1)).shr(1));
    if (r == fpn_from_u64(1, a.basis)) return 1;
    if (r == fpn_neg(fpn_from_u64(1, a.basis))) return -1;
    throw FieldError("quadratic character undefined over F_{p^n}");
}

inline ExtFieldElement fpn_cbrt(const ExtFieldElement& a) {
    const Uint q = a.basis->size();
    if (q.mod(Uint(3)) != Uint(2)) throw FieldError("cube root requires q = 2 (mod 3)");
    return fpn_pow(a, q.mul_small(2).sub(Uint(1)).div(Uint(3)));
}

// ---------------------------------------------------------------------------
// Uniform element interface used by the generic curve templates. For odd
// characteristic the Weierstrass and Edwards formulas are written once
// against these functions and instantiated per element type.

inline FieldElement fe_add(const FieldElement& a, const FieldElement& b) { return a + b; }
inline FieldElement fe_sub(const FieldElement& a, const FieldElement& b) { return a - b; }
inline FieldElement fe_mul(const FieldElement& a, const FieldElement& b) { return a * b; }
inline FieldElement fe_div(const FieldElement& a, const FieldElement& b) { return a / b; }
inline FieldElement fe_neg(const FieldElement& a) { return fp_neg(a); }
inline bool fe_is_zero(const FieldElement& a) { return a.value.is_zero(); }
inline FieldElement fe_from_u64_like(const FieldElement& sample, std::uint64_t v) {
    return fp_make(Uint(v), sample.modulus);
}
inline Uint fe_field_size(const FieldElement& a) { return a.modulus; }
inline int fe_quad_char(const FieldElement& a) { return quad_char(a); }
inline FieldElement fe_cbrt(const FieldElement& a) { return fp_cbrt(a); }
inline std::size_t fe_byte_width(const FieldElement& a) { return (a.modulus.bit_length() + 7) / 8; }
inline std::vector<std::uint8_t> fe_to_bytes(const FieldElement& a) {
    return a.value.to_bytes_be(fe_byte_width(a));
}

inline Gf2mElement fe_add(const Gf2mElement& a, const Gf2mElement& b) { return a + b; }
inline Gf2mElement fe_sub(const Gf2mElement& a, const Gf2mElement& b) { return a + b; }
inline Gf2mElement fe_mul(const Gf2mElement& a, const Gf2mElement& b) { return a * b; }
inline Gf2mElement fe_div(const Gf2mElement& a, const Gf2mElement& b) { return a / b; }
inline Gf2mElement fe_neg(const Gf2mElement& a) { return a; }
inline bool fe_is_zero(const Gf2mElement& a) { return a.bits.is_zero(); }
inline Gf2mElement fe_from_u64_like(const Gf2mElement& sample, std::uint64_t v) {
    return gf2m_make(Uint(v), sample.reduction);
}
inline Uint fe_field_size(const Gf2mElement& a) { return Uint(1).shl(gf2m_degree_bound(a)); }
inline std::size_t fe_byte_width(const Gf2mElement& a) { return (gf2m_degree_bound(a) + 7) / 8; }
inline std::vector<std::uint8_t> fe_to_bytes(const Gf2mElement& a) {
    return a.bits.to_bytes_be(fe_byte_width(a));
}

inline ExtFieldElement fe_add(const ExtFieldElement& a, const ExtFieldElement& b) { return a + b; }
inline ExtFieldElement fe_sub(const ExtFieldElement& a, const ExtFieldElement& b) { return a - b; }
inline ExtFieldElement fe_mul(const ExtFieldElement& a, const ExtFieldElement& b) { return a * b; }
inline ExtFieldElement fe_div(const ExtFieldElement& a, const ExtFieldElement& b) { return a / b; }
inline ExtFieldElement fe_neg(const ExtFieldElement& a) { return fpn_neg(a); }
inline bool fe_is_zero(const ExtFieldElement& a) { return fpn_is_zero(a); }
inline ExtFieldElement fe_from_u64_like(const ExtFieldElement& sample, std::uint64_t v) {
    return fpn_from_u64(v, sample.basis);
}
inline Uint fe_field_size(const ExtFieldElement& a) { return a.basis->size(); }
inline int fe_quad_char(const ExtFieldElement& a) { return quad_char(a); }
inline ExtFieldElement fe_cbrt(const ExtFieldElement& a) { return fpn_cbrt(a); }
inline std::size_t fe_byte_width(const ExtFieldElement& a) {
    return a.basis->degree() * ((a.basis->p.bit_length() + 7) / 8);
}
inline std::vector<std::uint8_t> fe_to_bytes(const ExtFieldElement& a) {
    const std::size_t w = (a.basis->p.bit_length() + 7) / 8;
    std::vector<std::uint8_t> out;
    out.reserve(a.coords.size() * w);
    for (const auto& c : a.coords) {
        auto part = c.to_bytes_be(w);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

}  // namespace ecid
