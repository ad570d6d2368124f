#pragma once

// Affine group law, scalar multiplication and brute-force order oracles for
// the three curve models in use:
//   y^2 = x^3 + ax + b            over F_p / F_{p^n}   (odd characteristic)
//   y^2 + xy = x^3 + ax^2 + b     over F_{2^m}         (non-supersingular)
//   x^2 + y^2 = 1 + d x^2 y^2     over F_p             (Edwards)
//
// Strict mode (the default) validates points on every public operation, so
// malformed points are rejected instead of silently producing garbage;
// identification protocols must never run the group law off the curve.

#include <functional>
#include <utility>
#include <vector>

#include "ecid/fields.hpp"

namespace ecid {

class CurveError : public Error {
public:
    explicit CurveError(const std::string& what) : Error(what) {}
};

template <class E>
struct AffinePoint {
    bool infinity = true;
    E x, y;

    static AffinePoint at_infinity(const E& sample) {
        return {true, fe_from_u64_like(sample, 0), fe_from_u64_like(sample, 0)};
    }
    static AffinePoint affine(E px, E py) { return {false, std::move(px), std::move(py)}; }

    bool operator==(const AffinePoint& o) const {
        if (infinity != o.infinity) return false;
        if (infinity) return true;
        return x == o.x && y == o.y;
    }
};

// Element enumeration for desk-scale counting. Callback receives each field
// element exactly once.
inline void fe_for_each(const FieldElement& sample, const std::function<void(const FieldElement&)>& fn) {
    for (Uint v; v < sample.modulus; v = v.add(Uint(1))) fn(FieldElement{v, sample.modulus});
}

inline void fe_for_each(const Gf2mElement& sample, const std::function<void(const Gf2mElement&)>& fn) {
    const std::size_t m = gf2m_degree_bound(sample);
    const Uint end = Uint(1).shl(m);
    for (Uint v; v < end; v = v.add(Uint(1))) fn(Gf2mElement{v, sample.reduction});
}

inline void fe_for_each(const ExtFieldElement& sample, const std::function<void(const ExtFieldElement&)>& fn) {
    const auto& basis = sample.basis;
    std::vector<Uint> coords(basis->degree(), Uint());
    for (;;) {
        fn(ExtFieldElement{coords, basis});
        std::size_t i = 0;
        for (; i < coords.size(); ++i) {
            coords[i] = coords[i].add(Uint(1));
            if (coords[i] < basis->p) break;
            coords[i] = Uint();
        }
        if (i == coords.size()) return;
    }
}

// ---------------------------------------------------------------------------
// Short Weierstrass over odd characteristic (prime or extension field).

template <class E>
class WeierstrassCurve {
public:
    using Element = E;
    using Pt = AffinePoint<E>;

    WeierstrassCurve(E a, E b, bool strict = true) : a_(std::move(a)), b_(std::move(b)), strict_(strict) {}

    const E& a() const { return a_; }
    const E& b() const { return b_; }
    bool strict() const { return strict_; }
    Uint field_size() const { return fe_field_size(a_); }

    // Non-singularity: 4a^3 + 27b^2 != 0.
    void validate() const {
        E four = fe_from_u64_like(a_, 4), twenty_seven = fe_from_u64_like(a_, 27);
        E disc = fe_add(fe_mul(four, fe_mul(a_, fe_mul(a_, a_))),
                        fe_mul(twenty_seven, fe_mul(b_, b_)));
        if (fe_is_zero(disc))
            throw CurveError("singular Weierstrass curve: 4a^3 + 27b^2 = 0");
    }

    Pt identity() const { return Pt::at_infinity(a_); }
    bool is_identity(const Pt& P) const { return P.infinity; }

    bool on_curve(const Pt& P) const {
        if (P.infinity) return true;
        E lhs = fe_mul(P.y, P.y);
        E rhs = fe_add(fe_mul(P.x, fe_mul(P.x, P.x)), fe_add(fe_mul(a_, P.x), b_));
        return lhs == rhs;
    }

    Pt neg(const Pt& P) const {
        if (P.infinity) return identity();
        return Pt::affine(P.x, fe_neg(P.y));
    }

    Pt add(const Pt& P, const Pt& Q) const {
        if (strict_) {
            require_on_curve(P);
            require_on_curve(Q);
        }
        if (P.infinity) return Q;
        if (Q.infinity) return P;
        E lambda = fe_from_u64_like(a_, 0);
        if (P.x == Q.x) {
            if (Q.y == fe_neg(P.y)) return identity();  // P + (-P); includes y = 0 doubling
            // tangent slope (3x^2 + a) / 2y
            E three = fe_from_u64_like(a_, 3), two = fe_from_u64_like(a_, 2);
            lambda = fe_div(fe_add(fe_mul(three, fe_mul(P.x, P.x)), a_), fe_mul(two, P.y));
        } else {
            lambda = fe_div(fe_sub(Q.y, P.y), fe_sub(Q.x, P.x));
        }
        E x3 = fe_sub(fe_sub(fe_mul(lambda, lambda), P.x), Q.x);
        E y3 = fe_sub(fe_mul(lambda, fe_sub(P.x, x3)), P.y);
        return Pt::affine(x3, y3);
    }

    Pt sub(const Pt& P, const Pt& Q) const { return add(P, neg(Q)); }

    // Exact #E(F_q) by solving for y at every x; +1 for the point at infinity.
    Uint count_points() const {
        Uint count(1);
        fe_for_each(a_, [&](const E& x) {
            E rhs = fe_add(fe_mul(x, fe_mul(x, x)), fe_add(fe_mul(a_, x), b_));
            int chi = fe_quad_char(rhs);
            count = count.add(Uint(static_cast<std::uint64_t>(1 + chi)));
        });
        return count;
    }

    void require_on_curve(const Pt& P) const {
        if (!on_curve(P)) throw CurveError("point is not on the curve");
    }

private:
    E a_, b_;
    bool strict_;
};

// ---------------------------------------------------------------------------
// Non-supersingular binary curve y^2 + xy = x^3 + ax^2 + b.

class BinaryCurve {
public:
    using Element = Gf2mElement;
    using Pt = AffinePoint<Gf2mElement>;

    BinaryCurve(Gf2mElement a, Gf2mElement b, bool strict = true)
        : a_(std::move(a)), b_(std::move(b)), strict_(strict) {}

    const Gf2mElement& a() const { return a_; }
    const Gf2mElement& b() const { return b_; }
    bool strict() const { return strict_; }
    Uint field_size() const { return Uint(1).shl(gf2m_degree_bound(a_)); }

    void validate() const {
        if (b_.bits.is_zero()) throw CurveError("singular binary curve: b = 0");
        if (!gf2_poly_is_irreducible(a_.reduction))
            throw CurveError("binary field reduction polynomial is not irreducible");
    }

    Pt identity() const { return Pt::at_infinity(a_); }
    bool is_identity(const Pt& P) const { return P.infinity; }

    bool on_curve(const Pt& P) const {
        if (P.infinity) return true;
        Gf2mElement lhs = P.y * P.y + P.x * P.y;
        Gf2mElement rhs = P.x * P.x * P.x + a_ * P.x * P.x + b_;
        return lhs == rhs;
    }

    // -(x, y) = (x, x + y)
    Pt neg(const Pt& P) const {
        if (P.infinity) return identity();
        return Pt::affine(P.x, P.x + P.y);
    }

    Pt add(const Pt& P, const Pt& Q) const {
        if (strict_) {
            require_on_curve(P);
            require_on_curve(Q);
        }
        if (P.infinity) return Q;
        if (Q.infinity) return P;
        if (P.x == Q.x && Q.y == P.x + P.y) return identity();  // P + (-P)
        Gf2mElement lambda{Uint(), a_.reduction};
        Gf2mElement x3{Uint(), a_.reduction};
        if (P.x == Q.x) {
            // doubling; x != 0 here since the sole x = 0 point is its own negative
            lambda = P.x + P.y / P.x;
            x3 = lambda * lambda + lambda + a_;
        } else {
            lambda = (P.y + Q.y) / (P.x + Q.x);
            x3 = lambda * lambda + lambda + a_ + P.x + Q.x;
        }
        Gf2mElement y3 = (Q.x + x3) * lambda + x3 + Q.y;
        return Pt::affine(x3, y3);
    }

    Pt sub(const Pt& P, const Pt& Q) const { return add(P, neg(Q)); }

    // Solutions of y^2 + xy = x^3 + ax^2 + b: one for x = 0, and for x != 0
    // substituting y = xz gives z^2 + z = w with w = x + a + b/x^2, solvable
    // iff Tr(w) = 0 (then exactly two roots). +1 for infinity.
    Uint count_points() const {
        Uint count(2);  // infinity and the unique (0, sqrt(b)) point
        fe_for_each(a_, [&](const Gf2mElement& x) {
            if (x.bits.is_zero()) return;
            Gf2mElement w = x + a_ + b_ / (x * x);
            if (gf2m_trace(w) == 0) count = count.add(Uint(2));
        });
        return count;
    }

    void require_on_curve(const Pt& P) const {
        if (!on_curve(P)) throw CurveError("point is not on the curve");
    }

private:
    Gf2mElement a_, b_;
    bool strict_;
};

// ---------------------------------------------------------------------------
// Edwards curve x^2 + y^2 = 1 + d x^2 y^2 with non-square d: the addition law
// is complete, a single formula with no case analysis. The identity is the
// affine point (0, 1).

template <class E>
class EdwardsCurve {
public:
    using Element = E;
    using Pt = AffinePoint<E>;

    EdwardsCurve(E d, bool strict = true) : d_(std::move(d)), strict_(strict) {}

    const E& d() const { return d_; }
    bool strict() const { return strict_; }
    Uint field_size() const { return fe_field_size(d_); }

    void validate() const {
        if (fe_is_zero(d_)) throw CurveError("Edwards d = 0 is degenerate");
        if (d_ == fe_from_u64_like(d_, 1)) throw CurveError("Edwards d = 1 is degenerate");
        if (fe_quad_char(d_) != -1)
            throw CurveError("Edwards d must be a non-square for the complete addition law");
    }

    Pt identity() const {
        return Pt::affine(fe_from_u64_like(d_, 0), fe_from_u64_like(d_, 1));
    }
    bool is_identity(const Pt& P) const { return !P.infinity && P == identity(); }

    bool on_curve(const Pt& P) const {
        if (P.infinity) return false;  // Edwards points are always affine
        E x2 = fe_mul(P.x, P.x), y2 = fe_mul(P.y, P.y);
        E lhs = fe_add(x2, y2);
        E rhs = fe_add(fe_from_u64_like(d_, 1), fe_mul(d_, fe_mul(x2, y2)));
        return lhs == rhs;
    }

    Pt neg(const Pt& P) const { return Pt::affine(fe_neg(P.x), P.y); }

    Pt add(const Pt& P, const Pt& Q) const {
        if (strict_) {
            require_on_curve(P);
            require_on_curve(Q);
        }
        E x1x2 = fe_mul(P.x, Q.x), y1y2 = fe_mul(P.y, Q.y);
        E cross = fe_add(fe_mul(P.x, Q.y), fe_mul(P.y, Q.x));
        E t = fe_mul(d_, fe_mul(x1x2, y1y2));
        E one = fe_from_u64_like(d_, 1);
        E x3 = fe_div(cross, fe_add(one, t));
        E y3 = fe_div(fe_sub(y1y2, x1x2), fe_sub(one, t));
        return Pt::affine(x3, y3);
    }

    Pt sub(const Pt& P, const Pt& Q) const { return add(P, neg(Q)); }

    // No point at infinity: every solution is affine; (0, 1) is included in
    // the count naturally.
    Uint count_points() const {
        Uint count;
        const E one = fe_from_u64_like(d_, 1);
        fe_for_each(d_, [&](const E& x) {
            E x2 = fe_mul(x, x);
            E rhs = fe_div(fe_sub(one, x2), fe_sub(one, fe_mul(d_, x2)));
            int chi = fe_quad_char(rhs);
            count = count.add(Uint(static_cast<std::uint64_t>(1 + chi)));
        });
        return count;
    }

    void require_on_curve(const Pt& P) const {
        if (!on_curve(P)) throw CurveError("point is not on the curve");
    }

private:
    E d_;
    bool strict_;
};

// ---------------------------------------------------------------------------
// Generic operations over any of the three models.

// Additive square-and-multiply: bits of k processed most significant first;
// per bit the accumulator is doubled, and the base added when the bit is set.
template <class Curve>
typename Curve::Pt scalar_mul(const Curve& curve, const Uint& k, const typename Curve::Pt& P) {
    if (curve.strict()) curve.require_on_curve(P);
    typename Curve::Pt Q = curve.identity();
    for (std::size_t i = k.bit_length(); i-- > 0;) {
        Q = curve.add(Q, Q);
        if (k.bit(i)) Q = curve.add(Q, P);
    }
    return Q;
}

// Desk-scale guard for the exact counting oracle.
inline constexpr std::uint64_t kNaiveCountLimit = 1u << 20;

template <class Curve>
Uint naive_point_count(const Curve& curve) {
    if (curve.field_size() > Uint(kNaiveCountLimit))
        throw CurveError(
            "field too large for brute-force point counting; supply order_hint in the registry");
    return curve.count_points();
}

// Trial division plus a primality check on the cofactor; sufficient for every
// shipped parameter set, where group orders are smooth times one large prime.
inline std::vector<std::pair<Uint, unsigned>> factorize(Uint n) {
    std::vector<std::pair<Uint, unsigned>> factors;
    auto pull = [&](const Uint& p) {
        unsigned e = 0;
        while (n.mod(p).is_zero()) {
            n = n.div(p);
            ++e;
        }
        if (e) factors.emplace_back(p, e);
    };
    pull(Uint(2));
    for (std::uint64_t d = 3; d < 100000; d += 2) {
        if (Uint(d) * Uint(d) > n) break;
        pull(Uint(d));
    }
    if (n > Uint(1)) {
        if (!is_probable_prime(n))
            throw CurveError("cannot factor group order: composite cofactor after trial division");
        factors.emplace_back(n, 1);
    }
    return factors;
}

// Least l > 0 with lP = identity, given the group order (hint or naive count).
template <class Curve>
Uint point_order(const Curve& curve, const typename Curve::Pt& P, const Uint& group_order) {
    if (curve.is_identity(P)) return Uint(1);
    if (!curve.is_identity(scalar_mul(curve, group_order, P)))
        throw CurveError("parameter-set corruption: N * P != identity, N is not the group order");
    Uint order = group_order;
    for (const auto& [prime, exp] : factorize(group_order)) {
        for (unsigned i = 0; i < exp; ++i) {
            if (!order.mod(prime).is_zero()) break;
            Uint reduced = order.div(prime);
            if (!curve.is_identity(scalar_mul(curve, reduced, P))) break;
            order = reduced;
        }
    }
    return order;
}

// Enumerates <P> = {P, 2P, ..., identity}; the identity is the last element.
template <class Curve>
std::vector<typename Curve::Pt> enumerate_subgroup(const Curve& curve, const typename Curve::Pt& P,
                                                   std::size_t cap = (1u << 16)) {
    std::vector<typename Curve::Pt> points;
    typename Curve::Pt cur = P;
    while (!curve.is_identity(cur)) {
        points.push_back(cur);
        if (points.size() > cap) throw CurveError("subgroup too large to enumerate");
        cur = curve.add(cur, P);
    }
    points.push_back(curve.identity());
    return points;
}

}  // namespace ecid
