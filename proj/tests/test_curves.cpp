#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "ecid/curves.hpp"
#include "support/oracles.hpp"

using namespace ecid;

namespace {

FieldElement fp(std::uint64_t v, std::uint64_t p) { return fp_make(Uint(v), Uint(p)); }

using WP = WeierstrassCurve<FieldElement>;
using ED = EdwardsCurve<FieldElement>;
using PtF = AffinePoint<FieldElement>;

WP toy17(bool strict = true) { return WP(fp(2, 17), fp(2, 17), strict); }

PtF pt(std::uint64_t x, std::uint64_t y, std::uint64_t p) {
    return PtF::affine(fp(x, p), fp(y, p));
}

PtF from_oracle(const oracles::PtZ& P, std::uint64_t p) {
    return P.inf ? PtF::at_infinity(fp(0, p)) : pt(P.x, P.y, p);
}

bool small_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace

TEST_CASE("curve validation accepts the worked examples and names failures") {
    CHECK_NOTHROW(toy17().validate());  // 4*8 + 27*4 = 140 = 4 (mod 17), nonzero
    CHECK_THROWS_WITH_AS(WP(fp(0, 17), fp(0, 17)).validate(),
                         doctest::Contains("singular"), CurveError);

    CHECK_NOTHROW(ED(fp(10, 19)).validate());  // 10 is a non-square mod 19
    CHECK_THROWS_WITH_AS(ED(fp(4, 19)).validate(), doctest::Contains("non-square"), CurveError);
    CHECK_THROWS_AS(ED(fp(0, 19)).validate(), CurveError);
    CHECK_THROWS_AS(ED(fp(1, 19)).validate(), CurveError);

    const Uint red(0b10011);
    BinaryCurve singular(gf2m_make(Uint(1), red), gf2m_make(Uint(0), red));
    CHECK_THROWS_WITH_AS(singular.validate(), doctest::Contains("b = 0"), CurveError);
}

TEST_CASE("toy17 doubling matches the hand-derived slope and the line-scan oracle") {
    auto E = toy17();
    // slope at (5,1): (3*25+2)/2 = 77/2 = 77 * 9 = 13 (mod 17); x3 = 169-10 = 6, y3 = 13*(5-6)-1 = 3
    PtF P = pt(5, 1, 17);
    CHECK(E.add(P, P) == pt(6, 3, 17));
    auto o = oracles::weierstrass_add(17, 2, 2, {false, 5, 1}, {false, 5, 1});
    CHECK(from_oracle(o, 17) == pt(6, 3, 17));
}

TEST_CASE("toy17 group law agrees with the chord-and-tangent oracle on every pair") {
    auto E = toy17();
    auto pts = oracles::scan_points(
        17, [](std::uint64_t x, std::uint64_t y) { return (y * y) % 17 == (x * x % 17 * x + 2 * x + 2) % 17; },
        true);
    REQUIRE(pts.size() == 19);
    for (const auto& P : pts)
        for (const auto& Q : pts) {
            auto expect = from_oracle(oracles::weierstrass_add(17, 2, 2, P, Q), 17);
            CHECK(E.add(from_oracle(P, 17), from_oracle(Q, 17)) == expect);
        }
}

TEST_CASE("identity and negation rules") {
    auto E = toy17();
    PtF P = pt(5, 1, 17);
    CHECK(E.add(P, E.identity()) == P);
    CHECK(E.add(E.identity(), P) == P);
    CHECK(E.is_identity(E.add(P, E.neg(P))));

    const Uint red(0b10011);
    auto el = [&](std::uint64_t b) { return gf2m_make(Uint(b), red); };
    BinaryCurve B(el(0b10), el(1));
    B.validate();
    // every point satisfies -P = (x, x+y) and P + (-P) = identity
    oracles::Gf2Ops F{0b10011, 4};
    auto bpts = oracles::scan_points(
        16,
        [&](std::uint64_t x, std::uint64_t y) {
            return (F.mul(y, y) ^ F.mul(x, y)) == (F.mul(F.mul(x, x), x) ^ F.mul(0b10, F.mul(x, x)) ^ 1);
        },
        false);
    REQUIRE(!bpts.empty());
    for (const auto& P0 : bpts) {
        auto Pb = AffinePoint<Gf2mElement>::affine(el(P0.x), el(P0.y));
        auto nPb = B.neg(Pb);
        CHECK(nPb.y == el(P0.x) + el(P0.y));
        CHECK(B.is_identity(B.add(Pb, nPb)));
    }
}

TEST_CASE("binary group law agrees with the line-scan oracle on every pair") {
    const Uint red(0b10011);
    auto el = [&](std::uint64_t b) { return gf2m_make(Uint(b), red); };
    oracles::Gf2Ops F{0b10011, 4};
    for (std::uint64_t a : {0b0ull, 0b10ull, 0b1000ull}) {
        BinaryCurve B(el(a), el(1));
        auto pts = oracles::scan_points(
            16,
            [&](std::uint64_t x, std::uint64_t y) {
                return (F.mul(y, y) ^ F.mul(x, y)) ==
                       (F.mul(F.mul(x, x), x) ^ F.mul(a, F.mul(x, x)) ^ 1);
            },
            true);
        for (const auto& P : pts)
            for (const auto& Q : pts) {
                auto lib = B.add(P.inf ? B.identity() : AffinePoint<Gf2mElement>::affine(el(P.x), el(P.y)),
                                 Q.inf ? B.identity() : AffinePoint<Gf2mElement>::affine(el(Q.x), el(Q.y)));
                auto exp = oracles::binary_add(F, a, 1, P, Q);
                if (exp.inf) {
                    CHECK(B.is_identity(lib));
                } else {
                    CHECK(lib == AffinePoint<Gf2mElement>::affine(el(exp.x), el(exp.y)));
                }
            }
    }
}

TEST_CASE("scalar multiplication is k-fold repeated addition") {
    auto E = toy17();
    PtF P = pt(5, 1, 17);
    CHECK(E.is_identity(scalar_mul(E, Uint(0), P)));
    CHECK(scalar_mul(E, Uint(1), P) == P);
    CHECK(E.is_identity(scalar_mul(E, Uint(19), P)));  // P has order 19

    PtF acc = E.identity();
    for (std::uint64_t k = 0; k <= 38; ++k) {
        CHECK(scalar_mul(E, Uint(k), P) == acc);
        acc = E.add(acc, P);
    }
}

TEST_CASE("naive point count matches full coordinate scans") {
    CHECK(naive_point_count(toy17()) == Uint(19));

    for (std::uint64_t p : {11ull, 13ull, 19ull, 23ull}) {
        for (std::uint64_t a = 0; a < 5; ++a)
            for (std::uint64_t b = 1; b < 5; ++b) {
                WP E(fp(a, p), fp(b, p));
                try {
                    E.validate();
                } catch (const CurveError&) {
                    continue;
                }
                auto pts = oracles::scan_points(
                    p,
                    [&](std::uint64_t x, std::uint64_t y) {
                        return y * y % p == (x * x % p * x + a * x + b) % p;
                    },
                    true);
                CHECK(naive_point_count(E) == Uint(pts.size()));
            }
    }

    // Edwards over F_19, d = 10: chi-based count vs full scan
    ED Ed(fp(10, 19));
    auto epts = oracles::scan_points(
        19,
        [](std::uint64_t x, std::uint64_t y) {
            return (x * x + y * y) % 19 == (1 + 10 * (x * x % 19) % 19 * (y * y % 19)) % 19;
        },
        false);
    CHECK(naive_point_count(Ed) == Uint(epts.size()));

    // binary F_16: trace-based count vs full scan
    const Uint red(0b10011);
    auto el = [&](std::uint64_t b) { return gf2m_make(Uint(b), red); };
    oracles::Gf2Ops F{0b10011, 4};
    BinaryCurve B(el(0b10), el(1));
    auto bpts = oracles::scan_points(
        16,
        [&](std::uint64_t x, std::uint64_t y) {
            return (F.mul(y, y) ^ F.mul(x, y)) == (F.mul(F.mul(x, x), x) ^ F.mul(0b10, F.mul(x, x)) ^ 1);
        },
        true);
    CHECK(naive_point_count(B) == Uint(bpts.size()));

    // guard: too-large field refuses with guidance
    WP big(fp(2, 2097169), fp(2, 2097169));  // prime just above 2^21
    CHECK_THROWS_WITH_AS(naive_point_count(big), doctest::Contains("order_hint"), CurveError);
}

TEST_CASE("Hasse bound holds for every non-singular curve over small primes") {
    for (std::uint64_t p : {11ull, 13ull, 17ull, 19ull, 23ull}) {
        REQUIRE(small_prime(p));
        for (std::uint64_t a = 0; a < p; ++a)
            for (std::uint64_t b = 0; b < p; ++b) {
                WP E(fp(a, p), fp(b, p));
                try {
                    E.validate();
                } catch (const CurveError&) {
                    continue;
                }
                Uint N = naive_point_count(E);
                double diff = std::abs(static_cast<double>(N.low_u64()) - static_cast<double>(p + 1));
                CHECK(diff <= 2.0 * std::sqrt(static_cast<double>(p)));
            }
    }
}

TEST_CASE("point order on toy17 and Lagrange divisibility") {
    auto E = toy17();
    CHECK(point_order(E, E.identity(), Uint(19)) == Uint(1));
    CHECK(point_order(E, pt(5, 1, 17), Uint(19)) == Uint(19));

    // every sampled point's order divides the group order
    for (std::uint64_t p : {11ull, 13ull}) {
        for (std::uint64_t a = 1; a < 4; ++a) {
            WP E2(fp(a, p), fp(3, p));
            try {
                E2.validate();
            } catch (const CurveError&) {
                continue;
            }
            Uint N = naive_point_count(E2);
            auto pts = oracles::scan_points(
                p,
                [&](std::uint64_t x, std::uint64_t y) {
                    return y * y % p == (x * x % p * x + a * x + 3) % p;
                },
                false);
            for (const auto& P0 : pts) {
                Uint ord = point_order(E2, pt(P0.x, P0.y, p), N);
                CHECK(N.mod(ord).is_zero());
                CHECK(E2.is_identity(scalar_mul(E2, ord, pt(P0.x, P0.y, p))));
            }
        }
    }

    // corrupted order hint is rejected
    CHECK_THROWS_WITH_AS(point_order(E, pt(5, 1, 17), Uint(20)),
                         doctest::Contains("corruption"), CurveError);
}

TEST_CASE("Edwards identity, negation and exhaustive closure") {
    ED Ed(fp(10, 19));
    Ed.validate();
    auto pts = oracles::scan_points(
        19,
        [](std::uint64_t x, std::uint64_t y) {
            return (x * x + y * y) % 19 == (1 + 10 * (x * x % 19) % 19 * (y * y % 19)) % 19;
        },
        false);
    auto id = Ed.identity();
    CHECK(id == pt(0, 1, 19));
    for (const auto& P0 : pts) {
        PtF P = pt(P0.x, P0.y, 19);
        CHECK(Ed.add(P, id) == P);
        CHECK(Ed.add(id, P) == P);
        CHECK(Ed.is_identity(Ed.add(P, Ed.neg(P))));
        for (const auto& Q0 : pts) {
            PtF Q = pt(Q0.x, Q0.y, 19);
            CHECK(Ed.on_curve(Ed.add(P, Q)));
        }
    }
}

TEST_CASE("exhaustive associativity and commutativity on toy17") {
    auto E = toy17();
    auto subgroup = enumerate_subgroup(E, pt(5, 1, 17));
    REQUIRE(subgroup.size() == 19);
    for (const auto& P : subgroup)
        for (const auto& Q : subgroup) {
            CHECK(E.add(P, Q) == E.add(Q, P));
            for (const auto& R : subgroup)
                CHECK(E.add(E.add(P, Q), R) == E.add(P, E.add(Q, R)));
        }
}

TEST_CASE("strict mode rejects off-curve inputs, fast mode computes blindly") {
    auto E = toy17();
    PtF bogus = pt(5, 2, 17);  // (5,2): 4 != 125+10+2 = 1 (mod 17)
    CHECK(!E.on_curve(bogus));
    CHECK_THROWS_AS(E.add(bogus, pt(5, 1, 17)), CurveError);
    CHECK_THROWS_AS(scalar_mul(E, Uint(2), bogus), CurveError);
    auto fast = toy17(false);
    CHECK_NOTHROW(fast.add(bogus, pt(5, 1, 17)));
}

TEST_CASE("Weierstrass law over the extension field F_25") {
    auto basis = make_ext_basis(Uint(5), {Uint(2), Uint(0)});  // alpha^2 + 2
    auto el = [&](std::uint64_t c0, std::uint64_t c1) {
        return fpn_make({Uint(c0), Uint(c1)}, basis);
    };
    WeierstrassCurve<ExtFieldElement> E(el(1, 0), el(1, 0));
    E.validate();

    Uint N = naive_point_count(E);
    // Hasse: |N - 26| <= 2*sqrt(25) = 10
    CHECK(N <= Uint(36));
    CHECK(N >= Uint(16));

    // closure and commutativity over a generated subgroup
    AffinePoint<ExtFieldElement> G;
    bool found = false;
    fe_for_each(el(0, 0), [&](const ExtFieldElement& x) {
        if (found) return;
        fe_for_each(el(0, 0), [&](const ExtFieldElement& y) {
            if (found) return;
            auto cand = AffinePoint<ExtFieldElement>::affine(x, y);
            if (E.on_curve(cand)) {
                G = cand;
                found = true;
            }
        });
    });
    REQUIRE(found);
    auto sub = enumerate_subgroup(E, G);
    CHECK(N.mod(Uint(sub.size())).is_zero());
    for (const auto& P : sub)
        for (const auto& Q : sub) {
            auto S = E.add(P, Q);
            CHECK(E.on_curve(S));
            CHECK(S == E.add(Q, P));
        }
}
