#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "ecid/idproto.hpp"

using namespace ecid;

namespace {

BiometricString bio(const std::string& s) {
    return make_biometric(std::vector<std::uint8_t>(s.begin(), s.end()));
}

const Registry& reg() {
    static Registry r = Registry::builtin();
    return r;
}

const PrimeSystem& toy17() { return std::get<PrimeSystem>(reg().get("toy17")); }
const EdwardsSystem& toy19ed() { return std::get<EdwardsSystem>(reg().get("toy19ed")); }

// k-fold repeated addition, the independent scalar oracle.
template <class C>
typename C::Pt repeated_add(const C& curve, std::uint64_t k, const typename C::Pt& P) {
    auto acc = curve.identity();
    for (std::uint64_t i = 0; i < k; ++i) acc = curve.add(acc, P);
    return acc;
}

}  // namespace

TEST_CASE("registry builtins all satisfy their own validation") {
    for (const auto& name : reg().names()) CHECK_NOTHROW(reg().get(name));
    CHECK(reg().names().size() == 8);
    CHECK_THROWS_AS(reg().get("nope"), ConfigError);
}

TEST_CASE("Schnorr worked example on toy17: s=3, r=5, c=2") {
    const auto& sys = toy17();
    SchnorrKeypair<WeierstrassCurve<FieldElement>> kp{Uint(3),
                                                      scalar_mul(sys.curve, Uint(3), sys.base)};
    auto X = scalar_mul(sys.curve, Uint(5), sys.base);
    Uint y = submod(Uint(5), mulmod(Uint(3), Uint(2), sys.base_order), sys.base_order);
    CHECK(y == Uint(18));  // 5 - 6 mod 19
    CHECK(schnorr_verify(sys, kp.pub, X, Uint(2), y));
    // 18P + 2*(3P) = 24P = 5P, by the repeated-addition oracle
    CHECK(repeated_add(sys.curve, 24, sys.base) == X);

    // c = 0: y = r, X = rP accepts
    CHECK(schnorr_verify(sys, kp.pub, X, Uint(0), Uint(5)));

    // tampering: exhaustively only one y accepts per (X, c)
    CHECK(!schnorr_verify(sys, kp.pub, X, Uint(2), Uint(0)));
    for (std::uint64_t c = 0; c < 8; ++c) {
        int accepting = 0;
        for (std::uint64_t cand = 0; cand < 19; ++cand)
            if (schnorr_verify(sys, kp.pub, X, Uint(c), Uint(cand))) ++accepting;
        CHECK(accepting == 1);
    }
}

TEST_CASE("Schnorr linearity holds exhaustively and honest runs accept") {
    const auto& sys = toy17();
    SeededEntropy rng("schnorr");
    for (int i = 0; i < 20; ++i) {
        auto kp = schnorr_keygen(sys, rng);
        auto tr = schnorr_run(sys, kp, 3, rng);
        CHECK(tr.accepted);
    }
    // full (r, c) sweep at t = 3 for a fixed keypair
    SchnorrKeypair<WeierstrassCurve<FieldElement>> kp{Uint(7),
                                                      scalar_mul(sys.curve, Uint(7), sys.base)};
    for (std::uint64_t r = 0; r < 19; ++r) {
        auto X = scalar_mul(sys.curve, Uint(r), sys.base);
        for (std::uint64_t c = 0; c < 8; ++c) {
            Uint y = submod(Uint(r), mulmod(Uint(7), Uint(c), Uint(19)), Uint(19));
            CHECK(schnorr_verify(sys, kp.pub, X, Uint(c), y));
        }
    }
}

TEST_CASE("enrollment: same biometric, fresh randomness") {
    const auto& sys = toy17();
    SeededEntropy r1("enroll-1"), r2("enroll-2");
    auto [rec1, sec1] = enroll(bio("alice"), sys, "alice", r1);
    auto [rec2, sec2] = enroll(bio("alice"), sys, "alice", r2);
    CHECK(rec1.B == rec2.B);  // deterministic hash of the same biometric
    CHECK(!(sec1.alpha == sec2.alpha));
    CHECK(!(rec1.C_point == rec2.C_point));
    CHECK_NOTHROW(validate_record(sys, rec1));

    // C - B = alpha P, by direct group ops
    CHECK(sys.curve.sub(rec1.C_point, rec1.B) == scalar_mul(sys.curve, sec1.alpha, rec1.P));

    // s recomputable by the prover
    auto W = scalar_mul(sys.curve, sec1.alpha, rec1.B);
    CHECK(extract_secret_bytes(sys, W) == rec1.s);

    CHECK_THROWS_AS(enroll(bio(""), sys, "x", r1), MapError);
}

TEST_CASE("enrollment works on every model that has an encoding") {
    SeededEntropy rng("models");
    CHECK_NOTHROW(enroll(bio("alice"), toy19ed(), "alice", rng));
    CHECK_NOTHROW(enroll(bio("alice"), std::get<ExtSystem>(reg().get("toy125w")), "alice", rng));
    // binary model has no encoding
    CHECK_THROWS_AS(enroll(bio("alice"), std::get<BinarySystem>(reg().get("toy16b")), "a", rng),
                    MapError);
    // secp160r1: p = 1 (mod 3), no Icart route
    CHECK_THROWS_AS(enroll(bio("alice"), std::get<PrimeSystem>(reg().get("secp160r1")), "a", rng),
                    MapError);
    // toy25w: q = 25 = 1 (mod 3), likewise no Icart route
    CHECK_THROWS_AS(enroll(bio("alice"), std::get<ExtSystem>(reg().get("toy25w")), "a", rng),
                    MapError);
    // toy125w: D_k secret over the F_125 subgroup, full honest run
    const auto& e25 = std::get<ExtSystem>(reg().get("toy125w"));
    auto [rec, sec] = enroll(bio("carol"), e25, "carol", rng);
    ProverSession prover(e25, rec, sec);
    VerifierSession verifier(e25, rec);
    verifier.on_commit(prover.commit(rng));
    auto e = verifier.challenge(rng);
    CHECK(verifier.on_response(prover.respond(e)));
}

TEST_CASE("enrollment enforces the lemma bound when the profile demands it") {
    SeededEntropy rng("bounds");
    auto sys = toy17();  // copy; builtin toys do not enforce bounds
    sys.profile.enforce_bounds = true;
    // at toy sizes no k satisfies the L_k bound inequality
    CHECK_THROWS_AS(enroll(bio("alice"), sys, "alice", rng), ExtractorError);

    // production profile admits its configured k
    const auto& prod = std::get<EdwardsSystem>(reg().get("curve1174"));
    CHECK(check_extractor_params(prod.extractor_params()).ok);
}

TEST_CASE("prover commitments are on-curve and r is single-use") {
    const auto& sys = toy17();
    SeededEntropy rng("commit");
    auto [rec, sec] = enroll(bio("alice"), sys, "alice", rng);
    ProverSession prover(sys, rec, sec);
    for (int i = 0; i < 1000; ++i) {
        auto D = prover.commit(rng);
        CHECK(sys.curve.on_curve(D));
        CHECK_THROWS_AS(prover.commit(rng), ProtoError);  // session in flight
        Uint y = prover.respond(Uint(1));
        CHECK(y < sys.base_order);
        CHECK_THROWS_AS(prover.respond(Uint(1)), ProtoError);  // r erased
    }
    // frozen small case: alpha=2, r=7 -> D = 7P - 2B, via the repeated-add oracle
    auto D = sys.curve.sub(repeated_add(sys.curve, 7, rec.P), repeated_add(sys.curve, 2, rec.B));
    auto expect = sys.curve.sub(scalar_mul(sys.curve, Uint(7), rec.P),
                                scalar_mul(sys.curve, Uint(2), rec.B));
    CHECK(D == expect);
}

TEST_CASE("challenge domain and ordering rules") {
    const auto& sys = toy17();
    SeededEntropy rng("challenge");
    auto [rec, sec] = enroll(bio("alice"), sys, "alice", rng);

    // t = 1: the only challenge is 1
    auto rec_t1 = rec;
    rec_t1.t = 1;
    ProverSession p1(sys, rec_t1, sec);
    for (int i = 0; i < 20; ++i) {
        VerifierSession v1(sys, rec_t1);
        v1.on_commit(p1.commit(rng));
        CHECK(v1.challenge(rng) == Uint(1));
        p1.respond(Uint(1));
    }

    // t = 8: challenges uniform in [1, 128]; chi-square within 4 sigma
    auto rec_t8 = rec;
    rec_t8.t = 8;
    std::vector<std::size_t> counts(129, 0);
    ProverSession p8(sys, rec_t8, sec);
    const int samples = 10000;
    for (int i = 0; i < samples; ++i) {
        VerifierSession v8(sys, rec_t8);
        v8.on_commit(p8.commit(rng));
        Uint e = v8.challenge(rng);
        REQUIRE(!e.is_zero());
        REQUIRE(e <= Uint(128));
        counts[e.low_u64()]++;
        p8.respond(e);
    }
    double expect = samples / 128.0, chi2 = 0;
    for (int v = 1; v <= 128; ++v) {
        double d = counts[v] - expect;
        chi2 += d * d / expect;
    }
    // df = 127: mean 127, sigma = sqrt(254) ~ 15.94
    CHECK(chi2 < 127 + 4 * 15.94);
    CHECK(chi2 > 127 - 4 * 15.94);

    // protocol-order violations
    VerifierSession v(sys, rec);
    CHECK_THROWS_AS(v.challenge(rng), ProtoError);        // challenge before commit
    CHECK_THROWS_AS(v.on_response(Uint(1)), ProtoError);  // response before challenge
}

TEST_CASE("response arithmetic: frozen example and edge values") {
    const auto& sys = toy17();
    // r=7, e=2, alpha=2 -> y = 7 - 4 = 3 (mod 19)
    CHECK(submod(Uint(7), mulmod(Uint(2), Uint(2), Uint(19)), Uint(19)) == Uint(3));
    // r = e*alpha -> y = 0 is valid and verifies
    SeededEntropy rng("edge");
    auto [rec, sec] = enroll(bio("alice"), sys, "alice", rng);
    for (std::uint64_t e = 1; e <= 4; ++e) {
        Uint r = mulmod(Uint(e), sec.alpha, sys.base_order);
        if (r.is_zero()) continue;
        auto D = sys.curve.sub(scalar_mul(sys.curve, r, rec.P),
                               scalar_mul(sys.curve, sec.alpha, rec.B));
        CHECK(verifier_check(sys, rec, D, Uint(e), Uint(0)));
    }
}

TEST_CASE("completeness is exhaustive on toy17 and toy19ed, and W = alpha B") {
    SeededEntropy rng("complete");
    auto run_exhaustive = [&](const auto& sys) {
        auto [rec, sec] = enroll(bio("alice"), sys, "alice", rng);
        auto W_expect = scalar_mul(sys.curve, sec.alpha, rec.B);
        const std::uint64_t l = sys.base_order.low_u64();
        for (std::uint64_t r = 1; r < l; ++r) {
            auto D = sys.curve.sub(scalar_mul(sys.curve, Uint(r), rec.P),
                                   scalar_mul(sys.curve, sec.alpha, rec.B));
            for (std::uint64_t e = 1; e <= 4; ++e) {  // t = 3
                Uint y = submod(Uint(r), mulmod(Uint(e), sec.alpha, sys.base_order),
                                sys.base_order);
                CHECK(verifier_check(sys, rec, D, Uint(e), y));
                // the algebraic identity yP - D - e(B - C) = alpha B, by group ops
                auto CmB = sys.curve.sub(rec.C_point, rec.B);
                auto W = sys.curve.add(sys.curve.sub(scalar_mul(sys.curve, y, rec.P), D),
                                       scalar_mul(sys.curve, Uint(e), CmB));
                CHECK(W == W_expect);
            }
        }
    };
    run_exhaustive(toy17());
    run_exhaustive(toy19ed());
}

TEST_CASE("tampered responses reject except on the exactly-counted collision set") {
    const auto& sys = toy17();
    SeededEntropy rng("tamper");
    auto [rec, sec] = enroll(bio("alice"), sys, "alice", rng);

    std::size_t accepted = 0, expected_accepts = 0, trials = 0;
    const std::uint64_t l = sys.base_order.low_u64();
    for (std::uint64_t r = 1; r < l; ++r) {
        auto D = sys.curve.sub(scalar_mul(sys.curve, Uint(r), rec.P),
                               scalar_mul(sys.curve, sec.alpha, rec.B));
        for (std::uint64_t e = 1; e <= 4; ++e) {
            Uint y = submod(Uint(r), mulmod(Uint(e), sec.alpha, sys.base_order), sys.base_order);
            Uint y_bad = addmod(y, Uint(1), sys.base_order);
            ++trials;
            // W' = alphaB + (y'-y)P; accepted iff W' is an extraction preimage of s
            if (verifier_check(sys, rec, D, Uint(e), y_bad)) ++accepted;
            auto W_bad = sys.curve.add(scalar_mul(sys.curve, sec.alpha, rec.B),
                                       scalar_mul(sys.curve, Uint(1), rec.P));
            if (!sys.curve.is_identity(W_bad) && extract_secret_bytes(sys, W_bad) == rec.s)
                ++expected_accepts;
        }
    }
    CHECK(accepted == expected_accepts);  // measured = counted, exactly
    CHECK(trials == 72);
}

TEST_CASE("special soundness recovers alpha from every transcript pair") {
    const auto& sys = toy17();
    SeededEntropy rng("soundness");
    auto [rec, sec] = enroll(bio("alice"), sys, "alice", rng);
    using Tr = Transcript<WeierstrassCurve<FieldElement>>;

    const std::uint64_t l = sys.base_order.low_u64();
    for (std::uint64_t r = 1; r < l; ++r) {
        auto D = sys.curve.sub(scalar_mul(sys.curve, Uint(r), rec.P),
                               scalar_mul(sys.curve, sec.alpha, rec.B));
        std::vector<Tr> trs;
        for (std::uint64_t e = 1; e <= 4; ++e) {
            Uint y = submod(Uint(r), mulmod(Uint(e), sec.alpha, sys.base_order), sys.base_order);
            Tr t{D, Uint(e), y, verifier_check(sys, rec, D, Uint(e), y)};
            REQUIRE(t.accepted);
            trs.push_back(t);
        }
        for (std::size_t i = 0; i < trs.size(); ++i)
            for (std::size_t j = 0; j < trs.size(); ++j) {
                if (i == j) continue;
                CHECK(extract_alpha_from_transcripts(sys, trs[i], trs[j]) == sec.alpha);
            }
        // error paths
        CHECK_THROWS_AS(extract_alpha_from_transcripts(sys, trs[0], trs[0]), ProtoError);
        Tr other = trs[1];
        other.D = sys.curve.add(D, rec.P);
        CHECK_THROWS_AS(extract_alpha_from_transcripts(sys, trs[0], other), ProtoError);
        Tr rejected = trs[2];
        rejected.accepted = false;
        CHECK_THROWS_AS(extract_alpha_from_transcripts(sys, trs[0], rejected), ProtoError);
    }
}

TEST_CASE("verifier_check rejects malformed inputs loudly") {
    const auto& sys = toy17();
    SeededEntropy rng("malformed");
    auto [rec, sec] = enroll(bio("alice"), sys, "alice", rng);
    auto off = AffinePoint<FieldElement>::affine(fp_make(Uint(5), Uint(17)),
                                                 fp_make(Uint(2), Uint(17)));
    CHECK_THROWS_AS(verifier_check(sys, rec, off, Uint(1), Uint(1)), ProtoError);
    auto D = sys.curve.identity();
    CHECK_THROWS_AS(verifier_check(sys, rec, D, Uint(0), Uint(1)), ProtoError);   // e = 0
    CHECK_THROWS_AS(verifier_check(sys, rec, D, Uint(5), Uint(1)), ProtoError);   // e > 2^(t-1)
    CHECK_THROWS_AS(verifier_check(sys, rec, D, Uint(1), Uint(19)), ProtoError);  // y >= l
}

TEST_CASE("identity commitment without alpha accepts only on the collision set") {
    const auto& sys = toy17();
    SeededEntropy rng("identityD");
    auto [rec, sec] = enroll(bio("alice"), sys, "alice", rng);
    auto all = enumerate_subgroup(sys.curve, sys.base);
    std::size_t preimages = 0;
    for (const auto& W : all) {
        if (sys.curve.is_identity(W)) continue;
        if (extract_secret_bytes(sys, W) == rec.s) ++preimages;
    }
    REQUIRE(preimages >= 1);  // alpha*B itself is one
    // D = identity, y sweeps Z_l; W = yP + e(C-B) hits each group element once per e
    std::size_t accepted = 0, trials = 0;
    for (std::uint64_t y = 0; y < 19; ++y)
        for (std::uint64_t e = 1; e <= 4; ++e) {
            ++trials;
            if (verifier_check(sys, rec, sys.curve.identity(), Uint(e), Uint(y))) ++accepted;
        }
    CHECK(accepted == 4 * preimages);
    CHECK(trials == 76);
}

TEST_CASE("ElGamal enrollment sealing round-trips and randomizes") {
    const auto& sys = toy17();
    SeededEntropy rng("elgamal");
    auto kp = elgamal_keygen(sys, rng);
    auto all = enumerate_subgroup(sys.curve, sys.base);
    std::vector<std::uint8_t> s{0xde, 0xad};
    for (const auto& B : all) {
        auto ct = encrypt_point_for_enrollment(sys, B, s, kp.pub, rng);
        auto [B2, s2] = decrypt_enrollment(sys, ct, kp.secret);
        CHECK(B2 == B);
        CHECK(s2 == s);
    }
    auto ct1 = encrypt_point_for_enrollment(sys, sys.base, s, kp.pub, rng);
    auto ct2 = encrypt_point_for_enrollment(sys, sys.base, s, kp.pub, rng);
    CHECK(!(ct1.c1 == ct2.c1));  // fresh k per encryption

    // wrong private key produces a record that fails its invariants downstream
    auto [rec, sec] = enroll(bio("alice"), sys, "alice", rng);
    auto ct = encrypt_point_for_enrollment(sys, rec.B, rec.s, kp.pub, rng);
    Uint wrong = kp.secret == Uint(1) ? Uint(2) : kp.secret.sub(Uint(1));
    auto [Bbad, sbad] = decrypt_enrollment(sys, ct, wrong);
    CHECK((!(Bbad == rec.B) || sbad != rec.s));

    // structural tamper: bending c2 to another curve point corrupts B
    auto ct3 = encrypt_point_for_enrollment(sys, rec.B, rec.s, kp.pub, rng);
    ct3.c2 = sys.curve.add(ct3.c2, sys.base);
    auto [Bt, st] = decrypt_enrollment(sys, ct3, kp.secret);
    CHECK(!(Bt == rec.B));
    CHECK(st == rec.s);  // mask unchanged when only c2 moves
}
