#pragma once

// Deterministic encodings of field elements and byte strings into curve
// points: the Icart map for odd-characteristic Weierstrass curves with
// q = 2 (mod 3), and the Elligator decoding function for complete Edwards
// curves with q = 3 (mod 4), plus the biometric hash-to-point wrapper.

#include <span>
#include <vector>

#include "ecid/bits.hpp"
#include "ecid/curves.hpp"
#include "ecid/sha256.hpp"

namespace ecid {

class MapError : public Error {
public:
    explicit MapError(const std::string& what) : Error(what) {}
};

inline Uint fe_characteristic(const FieldElement& a) { return a.modulus; }
inline Uint fe_characteristic(const ExtFieldElement& a) { return a.basis->p; }

// Field element from an index in [0, q): the base-p digit expansion for
// extension fields, the value itself for prime fields.
inline FieldElement fe_from_index_like(const FieldElement& sample, const Uint& idx) {
    return fp_make(idx, sample.modulus);
}
inline ExtFieldElement fe_from_index_like(const ExtFieldElement& sample, const Uint& idx) {
    std::vector<Uint> coords;
    Uint rest = idx.mod(sample.basis->size());
    for (std::size_t i = 0; i < sample.basis->degree(); ++i) {
        auto [q, r] = rest.divmod(sample.basis->p);
        coords.push_back(r);
        rest = q;
    }
    return {std::move(coords), sample.basis};
}

// ---------------------------------------------------------------------------
// Icart's map u -> (x, y) with v = (3a - u^4)/(6u), x = (v^2 - b - u^6/27)^(1/3)
// + u^2/3, y = ux + v; f(0) = identity. Total on F_q and always lands on the
// curve when q = 2 (mod 3).

template <class E>
AffinePoint<E> icart_encode(const E& u, const WeierstrassCurve<E>& curve) {
    const Uint q = fe_field_size(u);
    if (q.mod(Uint(3)) != Uint(2)) throw MapError("Icart map requires q = 2 (mod 3)");
    if (fe_characteristic(u) < Uint(5)) throw MapError("Icart map requires characteristic >= 5");
    if (fe_is_zero(u)) return curve.identity();

    const E three = fe_from_u64_like(u, 3), six = fe_from_u64_like(u, 6);
    const E u2 = fe_mul(u, u);
    const E u4 = fe_mul(u2, u2);
    const E v = fe_div(fe_sub(fe_mul(three, curve.a()), u4), fe_mul(six, u));

    const E u6 = fe_mul(u4, u2);
    const E twenty_seven = fe_from_u64_like(u, 27);
    E radicand = fe_sub(fe_sub(fe_mul(v, v), curve.b()), fe_div(u6, twenty_seven));
    E x = fe_add(fe_cbrt(radicand), fe_div(u2, three));
    E y = fe_add(fe_mul(u, x), v);
    return AffinePoint<E>::affine(x, y);
}

// ---------------------------------------------------------------------------
// Elligator (decoding direction) for x^2 + y^2 = 1 + d x^2 y^2, q prime,
// q = 3 (mod 4). Parameters derive from a seed s: c = 2/s^2, r = c + 1/c,
// d = -(c+1)^2/(c-1)^2, with d guaranteed a non-square.

struct ElligatorParams {
    FieldElement s, c, r, d;
};

inline ElligatorParams elligator_setup(const FieldElement& s) {
    const Uint& q = s.modulus;
    if (q.mod(Uint(4)) != Uint(3)) throw MapError("Elligator requires q = 3 (mod 4)");
    if (s.value.is_zero()) throw MapError("Elligator seed s must be nonzero");
    const FieldElement two = fp_make(Uint(2), q);
    const FieldElement s2 = s * s;
    if ((s2 - two).value.is_zero() || (s2 + two).value.is_zero())
        throw MapError("Elligator seed must satisfy (s^2 - 2)(s^2 + 2) != 0");

    const FieldElement one = fp_make(Uint(1), q);
    FieldElement c = two / s2;
    if (c.value.is_zero() || (c - one).value.is_zero() || (c + one).value.is_zero())
        throw MapError("internal: c(c-1)(c+1) = 0 despite a valid seed");
    FieldElement r = c + fp_inv(c);
    if (r.value.is_zero()) throw MapError("internal: r = 0 despite a valid seed");
    FieldElement cp1 = c + one, cm1 = c - one;
    FieldElement d = fp_neg((cp1 * cp1) / (cm1 * cm1));
    if (quad_char(d) != -1) throw MapError("internal: derived d is a square despite the lemma");
    return {s, c, r, d};
}

// phi : F_q -> E(F_q), total; phi(1) = phi(-1) = (0, 1).
inline AffinePoint<FieldElement> elligator_phi(const FieldElement& t, const ElligatorParams& ep) {
    const Uint& q = t.modulus;
    if (q != ep.s.modulus) throw MapError("Elligator input from the wrong field");
    const FieldElement one = fp_make(Uint(1), q);
    auto identity = AffinePoint<FieldElement>::affine(fp_make(Uint(), q), one);
    if (t == one || t == fp_neg(one)) return identity;

    const FieldElement u = (one - t) / (one + t);
    const FieldElement u2 = u * u;
    const FieldElement r2 = ep.r * ep.r;
    const FieldElement two = fp_make(Uint(2), q);
    const FieldElement v = u * (u2 * u2 + (r2 - two) * u2 + one);  // u^5 + (r^2-2)u^3 + u

    const int chi_v = quad_char(v);
    if (chi_v == 0) return identity;  // unreachable for valid params; guarded degenerate case

    auto apply_chi = [&](int chi, const FieldElement& a) { return chi == 1 ? a : fp_neg(a); };
    const FieldElement X = apply_chi(chi_v, u);
    const FieldElement inv_c2 = fp_inv(ep.c * ep.c);
    const int chi_u = quad_char(u2 + inv_c2);
    // Y = (chi(v) v)^((q+1)/4) * chi(v) * chi(u^2 + 1/c^2)
    FieldElement Y = fp_pow(apply_chi(chi_v, v), q.add(Uint(1)).shr(2));
    Y = apply_chi(chi_v * chi_u, Y);

    const FieldElement onepX = one + X;
    const FieldElement x = ((ep.c - one) * ep.s * X * onepX) / Y;
    const FieldElement rX = ep.r * X;
    const FieldElement bracket = onepX * onepX;  // (1+X)^2
    const FieldElement y = (rX - bracket) / (rX + bracket);
    return AffinePoint<FieldElement>::affine(x, y);
}

// floor(log2(q)): the length of the Elligator bit-string domain.
inline std::size_t elligator_bit_length(const Uint& q) { return q.bit_length() - 1; }

// iota(tau) = phi(sigma(tau)) on S = { tau : sigma(tau) <= (q-1)/2 }; injective,
// with #S = (q+1)/2.
inline AffinePoint<FieldElement> elligator_iota(const Bits& tau, const ElligatorParams& ep) {
    const Uint& q = ep.s.modulus;
    const std::size_t b = elligator_bit_length(q);
    if (tau.count != b) throw MapError("iota input must have exactly floor(log2 q) bits");
    const Uint sigma = tau.value;
    if (sigma > q.sub(Uint(1)).shr(1)) throw MapError("iota input outside S: sigma(tau) > (q-1)/2");
    return elligator_phi(fp_make(sigma, q), ep);
}

// ---------------------------------------------------------------------------
// Biometric strings and the hash-to-point wrapper h. The digest is expanded
// to twice the field width before reduction, so the modular bias is at most
// 2^-(field bits).

struct BiometricString {
    std::vector<std::uint8_t> bytes;
};

inline constexpr std::size_t kMaxBiometricBytes = 4096;

inline BiometricString make_biometric(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw MapError("biometric string must be nonempty");
    if (bytes.size() > kMaxBiometricBytes) throw MapError("biometric string exceeds the configured maximum");
    return {std::vector<std::uint8_t>(bytes.begin(), bytes.end())};
}

namespace detail {
// Digest the input and reduce into [0, range) with a double-width expansion.
inline Uint digest_to_range(std::span<const std::uint8_t> input, const Uint& range) {
    const std::size_t width = 2 * ((range.bit_length() + 7) / 8) + 1;
    auto wide = sha256_expand(input, width);
    return Uint::from_bytes_be(wide).mod(range);
}
}  // namespace detail

// Icart route: digest into F_q^* and encode.
template <class E>
AffinePoint<E> hash_to_point(const BiometricString& b, const WeierstrassCurve<E>& curve) {
    const Uint q = curve.field_size();
    if (q.mod(Uint(3)) != Uint(2))
        throw MapError("hash_to_point: Icart route needs q = 2 (mod 3) on Weierstrass curves");
    Uint idx = detail::digest_to_range(b.bytes, q.sub(Uint(1))).add(Uint(1));  // [1, q-1]
    return icart_encode(fe_from_index_like(curve.a(), idx), curve);
}

// Elligator route: digest into S (as sigma in {0, ..., (q-1)/2}) and decode.
inline AffinePoint<FieldElement> hash_to_point(const BiometricString& b,
                                               const EdwardsCurve<FieldElement>& curve,
                                               const ElligatorParams& ep) {
    const Uint q = curve.field_size();
    if (q != ep.s.modulus) throw MapError("Elligator params do not match the curve field");
    Uint sigma = detail::digest_to_range(b.bytes, q.sub(Uint(1)).shr(1).add(Uint(1)));
    return elligator_iota(Bits::make(sigma, elligator_bit_length(q)), ep);
}

}  // namespace ecid
