#pragma once

// Deterministic randomness extractors on curve points and their exact
// diagnostics:
//   L_k: the k least-significant bits of the (negation-invariant) abscissa,
//         for curves over prime fields;
//   D_k: the first k base-field coordinates of the abscissa, for curves
//         over F_{p^n}.
//
// The lemma inequalities are checked over exact integer/rational arithmetic;
// log2 terms never touch floating point. The statistical-distance oracle
// enumerates a desk-scale subgroup and reports exact rationals.
//
// "Abscissa" here means the coordinate preserved by point negation: x for
// both Weierstrass shapes, y for Edwards (where -(x,y) = (-x,y)), so
// extract(P) = extract(-P) holds in every model.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ecid/bits.hpp"
#include "ecid/curves.hpp"
#include "ecid/rational.hpp"

namespace ecid {

class ExtractorError : public Error {
public:
    explicit ExtractorError(const std::string& what) : Error(what) {}
};

enum class ExtractorKind { lk, dk };

struct ExtractorParams {
    ExtractorKind kind = ExtractorKind::lk;
    std::size_t k = 0;           // output length: bits for L_k, coordinates for D_k
    std::size_t e = 0;           // security exponent
    std::size_t n = 0;           // L_k: bit length of p; D_k: extension degree
    std::size_t order_bits = 0;  // bit length of the subgroup order (the lemmas' l / t)
    std::size_t m = 0;           // D_k only: bit length of p
};

// ---------------------------------------------------------------------------
// Parameter validation against the lemma inequalities.
//   L_k: k <= 2l - (n + 2e + log2(n) + 6)
//   D_k: k <= (2t - 2e - nm - 4) / m
// Both are decided exactly; for L_k the real-valued log2(n) folds into
// ceil(log2 n) because k is an integer.

struct ExtractorBound {
    bool ok = false;
    long long max_k = 0;  // largest admissible k; may be negative (none admissible)
    std::string detail;
};

namespace detail {
inline long long ceil_log2(std::size_t n) {
    long long c = 0;
    std::size_t v = 1;
    while (v < n) {
        v *= 2;
        ++c;
    }
    return c;
}
}  // namespace detail

inline ExtractorBound check_extractor_params(const ExtractorParams& p) {
    if (p.k == 0 || p.e == 0 || p.n == 0 || p.order_bits == 0 ||
        (p.kind == ExtractorKind::dk && p.m == 0))
        throw ExtractorError("extractor sizes must all be positive");
    ExtractorBound r;
    if (p.kind == ExtractorKind::lk) {
        const long long l = static_cast<long long>(p.order_bits);
        const long long n = static_cast<long long>(p.n);
        const long long e = static_cast<long long>(p.e);
        r.max_k = 2 * l - n - 2 * e - 6 - detail::ceil_log2(p.n);
        r.ok = static_cast<long long>(p.k) <= r.max_k;
        r.detail = "L_k bound: k = " + std::to_string(p.k) +
                   " vs 2l - (n + 2e + log2(n) + 6) with 2l = " + std::to_string(2 * l) +
                   ", n + 2e + 6 = " + std::to_string(n + 2 * e + 6) +
                   ", ceil(log2 n) = " + std::to_string(detail::ceil_log2(p.n)) +
                   "; max admissible k = " + std::to_string(r.max_k);
    } else {
        const long long t = static_cast<long long>(p.order_bits);
        const long long n = static_cast<long long>(p.n);
        const long long e = static_cast<long long>(p.e);
        const long long m = static_cast<long long>(p.m);
        const long long num = 2 * t - 2 * e - n * m - 4;
        // floor division with negative numerators
        r.max_k = num >= 0 ? num / m : -((-num + m - 1) / m);
        r.ok = static_cast<long long>(p.k) <= r.max_k;
        r.detail = "D_k bound: k*m = " + std::to_string(p.k * p.m) +
                   " vs 2t - 2e - nm - 4 = " + std::to_string(num) +
                   "; max admissible k = " + std::to_string(r.max_k);
    }
    return r;
}

inline void validate_extractor_params(const ExtractorParams& p) {
    ExtractorBound b = check_extractor_params(p);
    if (!b.ok) throw ExtractorError("extractor parameters violate the lemma bound; " + b.detail);
}

// ---------------------------------------------------------------------------
// The extractors. The per-model abscissa is the negation-invariant coordinate.

inline const FieldElement& extraction_coordinate(const WeierstrassCurve<FieldElement>&,
                                                 const AffinePoint<FieldElement>& P) {
    return P.x;
}
inline const FieldElement& extraction_coordinate(const EdwardsCurve<FieldElement>&,
                                                 const AffinePoint<FieldElement>& P) {
    return P.y;
}

// lsb_k of the canonical representative in [0, p).
template <class Curve>
Bits extract_lk(const Curve& curve, const typename Curve::Pt& P, std::size_t k) {
    if (curve.is_identity(P)) throw ExtractorError("L_k is undefined at the identity point");
    const FieldElement& coord = extraction_coordinate(curve, P);
    if (k > coord.modulus.bit_length())
        throw ExtractorError("L_k output length exceeds the field size");
    return Bits{coord.value.trunc(k), k};
}

// First k F_p-coordinates of the abscissa against the fixed basis.
inline std::vector<FieldElement> extract_dk(const WeierstrassCurve<ExtFieldElement>& curve,
                                            const AffinePoint<ExtFieldElement>& P, std::size_t k) {
    if (curve.is_identity(P)) throw ExtractorError("D_k is undefined at the identity point");
    const std::size_t n = P.x.basis->degree();
    if (k == 0 || k >= n) throw ExtractorError("D_k requires 0 < k < n");
    auto coords = fpn_coords(P.x);
    coords.resize(k);
    return coords;
}

// Canonical byte form: fixed-width big-endian concatenation in basis order.
inline std::vector<std::uint8_t> dk_serialize(const std::vector<FieldElement>& coords) {
    std::vector<std::uint8_t> out;
    for (const auto& c : coords) {
        auto part = fe_to_bytes(c);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exact statistical-distance / collision oracle. The distribution is the
// extractor's output under uniform sampling of the non-identity subgroup
// elements (the extractors are undefined at the identity).

struct OracleReport {
    Rational delta;          // statistical distance to uniform on the range
    Rational collision;      // collision probability of two independent samples
    Uint range_size;
    std::size_t sample_count = 0;

    std::string to_string() const {
        return "delta = " + delta.to_string() + ", collision = " + collision.to_string() +
               ", range = " + range_size.to_dec() + ", samples = " + std::to_string(sample_count);
    }
};

inline constexpr std::size_t kOracleSubgroupLimit = 1u << 16;

inline OracleReport stat_distance_from_outcomes(const std::vector<Uint>& outcomes, const Uint& range) {
    if (range.is_zero()) throw ExtractorError("empty outcome range");
    std::map<std::string, std::size_t> hist;  // keyed by canonical hex
    for (const auto& o : outcomes) {
        if (o >= range) throw ExtractorError("outcome outside the declared range");
        ++hist[o.to_hex()];
    }
    const Uint samples(static_cast<std::uint64_t>(outcomes.size()));
    if (samples.is_zero()) throw ExtractorError("no samples");

    // delta = 1/2 sum_o |P(o) - 1/R|; unobserved outcomes contribute 1/R each.
    Rational delta;
    Rational collision;
    const Rational uniform(Uint(1), range);
    Uint observed(0);
    for (const auto& [key, count] : hist) {
        Rational p(Uint(static_cast<std::uint64_t>(count)), samples);
        delta = delta + (p - uniform).abs();
        collision = collision + p * p;
        observed = observed.add(Uint(1));
    }
    delta = delta + Rational(range.sub(observed), range);
    delta = delta * Rational(Uint(1), Uint(2));
    return {delta, collision, range, outcomes.size()};
}

template <class Curve>
OracleReport stat_distance_oracle(const Curve& curve,
                                  const std::vector<typename Curve::Pt>& subgroup,
                                  const ExtractorParams& params) {
    if (subgroup.size() > kOracleSubgroupLimit)
        throw ExtractorError("subgroup too large for exhaustive statistics");
    std::vector<Uint> outcomes;
    Uint range(1);
    if (params.kind == ExtractorKind::lk) {
        if constexpr (std::is_same_v<typename Curve::Element, FieldElement>) {
            range = Uint(1).shl(params.k);
            for (const auto& P : subgroup) {
                if (curve.is_identity(P)) continue;
                outcomes.push_back(extract_lk(curve, P, params.k).value);
            }
        } else {
            throw ExtractorError("L_k oracle requires a prime-field curve");
        }
    } else {
        if constexpr (std::is_same_v<typename Curve::Element, ExtFieldElement>) {
            const Uint p = subgroup.empty() ? Uint(2) : subgroup.front().x.basis->p;
            for (std::size_t i = 0; i < params.k; ++i) range = range.mul(p);
            for (const auto& P : subgroup) {
                if (curve.is_identity(P)) continue;
                auto coords = extract_dk(curve, P, params.k);
                Uint idx;
                for (std::size_t i = coords.size(); i-- > 0;) idx = idx.mul(p).add(coords[i].value);
                outcomes.push_back(idx);
            }
        } else {
            throw ExtractorError("D_k oracle requires an extension-field curve");
        }
    }
    return stat_distance_from_outcomes(outcomes, range);
}

// ---------------------------------------------------------------------------
// Lemma bounds as exact rationals (squared where a square root appears).
//   L_k:  delta <= 2^((k + n + log2 n)/2 + 3 - l)            [squared: rational]
//   D_k:      Col <= 1/p^k + 4 sqrt(q) / |G|^2,  delta <= 2 sqrt(p^(n+k)) / |G|

namespace detail {
inline Rational pow2_rational(long long exp) {
    if (exp >= 0) return Rational(Uint(1).shl(static_cast<std::size_t>(exp)), Uint(1));
    return Rational(Uint(1), Uint(1).shl(static_cast<std::size_t>(-exp)));
}
}  // namespace detail

// (L_k delta bound)^2 = n * 2^(k + n + 6 - 2l).
inline Rational lk_delta_bound_squared(std::size_t k, std::size_t n_bits, std::size_t l_bits) {
    long long exp = static_cast<long long>(k) + static_cast<long long>(n_bits) + 6 -
                    2 * static_cast<long long>(l_bits);
    return detail::pow2_rational(exp) * Rational(Uint(n_bits), Uint(1));
}

// True iff delta <= min(1, bound) where bound^2 is given exactly.
inline bool delta_within_bound(const Rational& delta, const Rational& bound_squared) {
    const Rational one = Rational::from_int(Uint(1));
    if (delta > one) return false;
    if (bound_squared >= one) return true;
    return delta * delta <= bound_squared;
}

// D_k collision bound check: Col <= min(1, 1/p^k + 4q/|G|^2), decided exactly
// over rationals. The q factor (not sqrt(q)) is what the Weil bound squared
// gives, and is the form consistent with this lemma's own statistical-distance
// bound 2 sqrt(p^(n+k))/|G| via Cauchy-Schwarz.
inline bool dk_collision_within_bound(const Rational& collision, const Uint& p, std::size_t k,
                                      std::size_t n, const Uint& subgroup_size) {
    const Rational one = Rational::from_int(Uint(1));
    if (collision > one) return false;
    Uint pk(1);
    for (std::size_t i = 0; i < k; ++i) pk = pk.mul(p);
    Uint q(1);
    for (std::size_t i = 0; i < n; ++i) q = q.mul(p);
    Rational bound = Rational(Uint(1), pk) +
                     Rational(Uint(4).mul(q), subgroup_size.mul(subgroup_size));
    if (bound >= one) return true;
    return collision <= bound;
}

// D_k statistical distance: delta <= min(1, 2 sqrt(p^(n+k)) / |G|).
inline bool dk_delta_within_bound(const Rational& delta, const Uint& p, std::size_t k, std::size_t n,
                                  const Uint& subgroup_size) {
    const Rational one = Rational::from_int(Uint(1));
    if (delta > one) return false;
    Uint pnk(1);
    for (std::size_t i = 0; i < n + k; ++i) pnk = pnk.mul(p);
    // bound^2 = 4 p^(n+k) / |G|^2
    Rational bound2(Uint(4).mul(pnk), subgroup_size.mul(subgroup_size));
    if (bound2 >= one) return true;
    return delta * delta <= bound2;
}

}  // namespace ecid
