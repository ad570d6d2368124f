#pragma once

// The identification protocols:
//   - EC-Schnorr baseline (commit X = rP, challenge c, response y = r - sc,
//     check X = yP + cZ);
//   - the biometric-seeded scheme: enrollment places (B, s, P, C) with the
//     verifier where B = h(biometric), s = Ext_k(alpha B), C = alpha P + B,
//     and identification runs commit D = rP - alpha B, challenge
//     e in {1, ..., 2^(t-1)}, response y = r - e alpha (mod l), check
//     Ext_k(yP - D - e(B - C)) = s.
//
// Prover and verifier sessions are explicit single-session state machines;
// the session scalar r is single-use and erased once the response is out.
// An EC-ElGamal helper seals (B, s) to the verifier's public key for
// enrollment over untrusted channels.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecid/entropy.hpp"
#include "ecid/extractors.hpp"
#include "ecid/maps.hpp"
#include "ecid/registry.hpp"

namespace ecid {

class ProtoError : public Error {
public:
    explicit ProtoError(const std::string& what) : Error(what) {}
};

// ---------------------------------------------------------------------------
// Hashing a biometric string to a point, routed by curve model.

template <class C>
typename C::Pt hash_biometric(const CurveSystem<C>& sys, const BiometricString& b) {
    if constexpr (std::is_same_v<C, EdwardsCurve<FieldElement>>) {
        if (!sys.elligator) throw MapError("Edwards set lacks Elligator parameters");
        return hash_to_point(b, sys.curve, *sys.elligator);
    } else if constexpr (std::is_same_v<C, BinaryCurve>) {
        throw MapError("no hash-to-point encoding is available for binary curves");
    } else {
        return hash_to_point(b, sys.curve);
    }
}

// Ext_k(W) in canonical byte form, per the curve's protocol profile.
template <class C>
std::vector<std::uint8_t> extract_secret_bytes(const CurveSystem<C>& sys,
                                               const typename C::Pt& W) {
    if (sys.profile.extractor == ExtractorKind::lk) {
        if constexpr (std::is_same_v<typename C::Element, FieldElement>) {
            return extract_lk(sys.curve, W, sys.profile.k).to_bytes();
        } else {
            throw ExtractorError("L_k requires a prime-field curve");
        }
    } else {
        if constexpr (std::is_same_v<typename C::Element, ExtFieldElement>) {
            return dk_serialize(extract_dk(sys.curve, W, sys.profile.k));
        } else {
            throw ExtractorError("D_k requires an extension-field curve");
        }
    }
}

// ---------------------------------------------------------------------------
// EC-Schnorr baseline.

template <class C>
struct SchnorrKeypair {
    Uint secret;          // s in [1, l)
    typename C::Pt pub;   // Z = sP
};

template <class C>
SchnorrKeypair<C> schnorr_keygen(const CurveSystem<C>& sys, EntropySource& rng) {
    Uint s = uniform_nonzero_below(rng, sys.base_order);
    return {s, scalar_mul(sys.curve, s, sys.base)};
}

template <class C>
struct SchnorrTranscript {
    typename C::Pt commitment;  // X = rP
    Uint challenge;             // c in Z_{2^t}
    Uint response;              // y = r - sc (mod l)
    bool accepted = false;
};

template <class C>
bool schnorr_verify(const CurveSystem<C>& sys, const typename C::Pt& Z,
                    const typename C::Pt& X, const Uint& c, const Uint& y) {
    auto rhs = sys.curve.add(scalar_mul(sys.curve, y, sys.base), scalar_mul(sys.curve, c, Z));
    return X == rhs;
}

// One full honest run; honest runs always accept.
template <class C>
SchnorrTranscript<C> schnorr_run(const CurveSystem<C>& sys, const SchnorrKeypair<C>& kp,
                                 std::size_t t, EntropySource& rng) {
    Uint r = uniform_nonzero_below(rng, sys.base_order);
    SchnorrTranscript<C> tr;
    tr.commitment = scalar_mul(sys.curve, r, sys.base);
    tr.challenge = uniform_below(rng, Uint(1).shl(t));
    tr.response = submod(r, mulmod(kp.secret, tr.challenge, sys.base_order), sys.base_order);
    tr.accepted = schnorr_verify(sys, kp.pub, tr.commitment, tr.challenge, tr.response);
    return tr;
}

// ---------------------------------------------------------------------------
// Enrollment.

template <class C>
struct EnrollmentRecord {
    std::string claimant_id;
    std::string curve_name;
    typename C::Pt B;               // hashed biometric (the shared "password" point)
    std::vector<std::uint8_t> s;    // Ext_k(alpha B)
    typename C::Pt P;               // session base point of order l
    typename C::Pt C_point;         // C = alpha P + B
    ExtractorParams extractor;
    std::size_t t = 3;
};

struct ProverSecret {
    Uint alpha;
};

template <class C>
std::pair<EnrollmentRecord<C>, ProverSecret> enroll(const BiometricString& bio,
                                                    const CurveSystem<C>& sys,
                                                    std::string claimant_id,
                                                    EntropySource& rng) {
    if (sys.profile.enforce_bounds) validate_extractor_params(sys.extractor_params());

    auto B = hash_biometric(sys, bio);
    if (sys.curve.is_identity(B))
        throw ProtoError("biometric hashes to the identity point; cannot enroll");

    // A random point of order l: u * base for uniform u (l is prime).
    Uint u = uniform_nonzero_below(rng, sys.base_order);
    auto P = scalar_mul(sys.curve, u, sys.base);

    // alpha with alpha*B != identity; resample if ord(B) divides alpha.
    Uint alpha;
    typename C::Pt W;
    for (int tries = 0;; ++tries) {
        alpha = uniform_nonzero_below(rng, sys.base_order);
        W = scalar_mul(sys.curve, alpha, B);
        if (!sys.curve.is_identity(W)) break;
        if (tries > 64) throw ProtoError("cannot find alpha with alpha*B != identity");
    }

    EnrollmentRecord<C> rec;
    rec.claimant_id = std::move(claimant_id);
    rec.curve_name = sys.name;
    rec.B = B;
    rec.s = extract_secret_bytes(sys, W);
    rec.P = P;
    rec.C_point = sys.curve.add(scalar_mul(sys.curve, alpha, P), B);
    rec.extractor = sys.extractor_params();
    rec.t = sys.profile.t;
    return {std::move(rec), ProverSecret{alpha}};
}

// ---------------------------------------------------------------------------
// Stateless verification (offline transcript replay uses this directly).
// Throws for malformed inputs (off-curve D, out-of-range e or y); returns
// false only for well-formed transcripts that fail the extraction equation.

template <class C>
bool verifier_check(const CurveSystem<C>& sys, const EnrollmentRecord<C>& rec,
                    const typename C::Pt& D, const Uint& e, const Uint& y) {
    if (!sys.curve.on_curve(D)) throw ProtoError("commitment point is not on the curve");
    if (e.is_zero() || e > Uint(1).shl(rec.t - 1))
        throw ProtoError("challenge outside {1, ..., 2^(t-1)}");
    if (y >= sys.base_order) throw ProtoError("response is not reduced mod l");

    // W = yP - D - e(B - C) = yP - D + e(C - B)
    auto CmB = sys.curve.sub(rec.C_point, rec.B);
    auto W = sys.curve.add(sys.curve.sub(scalar_mul(sys.curve, y, rec.P), D),
                           scalar_mul(sys.curve, e, CmB));
    if (sys.curve.is_identity(W)) return false;
    return extract_secret_bytes(sys, W) == rec.s;
}

// ---------------------------------------------------------------------------
// Session state machines.

template <class C>
struct Transcript {
    typename C::Pt D;
    Uint e;
    Uint y;
    bool accepted = false;
};

template <class C>
class ProverSession {
public:
    ProverSession(const CurveSystem<C>& sys, EnrollmentRecord<C> rec, ProverSecret secret)
        : sys_(&sys), rec_(std::move(rec)), alpha_(std::move(secret.alpha)) {
        if (alpha_.is_zero() || alpha_ >= sys.base_order)
            throw ProtoError("prover secret out of range");
    }

    // D = rP - alpha B with fresh r; refuses while a session is in flight.
    typename C::Pt commit(EntropySource& rng) {
        if (session_r_) throw ProtoError("commitment already in flight; response pending");
        session_r_ = uniform_nonzero_below(rng, sys_->base_order);
        auto D = sys_->curve.sub(scalar_mul(sys_->curve, *session_r_, rec_.P),
                                 scalar_mul(sys_->curve, alpha_, rec_.B));
        return D;
    }

    // y = (r - e alpha) mod l; erases r.
    Uint respond(const Uint& e) {
        if (!session_r_) throw ProtoError("no session in flight; commit first");
        if (e.is_zero() || e > Uint(1).shl(rec_.t - 1))
            throw ProtoError("challenge outside {1, ..., 2^(t-1)}");
        Uint y = submod(*session_r_, mulmod(e, alpha_, sys_->base_order), sys_->base_order);
        session_r_.reset();  // single use
        return y;
    }

    const EnrollmentRecord<C>& record() const { return rec_; }

private:
    const CurveSystem<C>* sys_;
    EnrollmentRecord<C> rec_;
    Uint alpha_;
    std::optional<Uint> session_r_;
};

template <class C>
class VerifierSession {
public:
    VerifierSession(const CurveSystem<C>& sys, EnrollmentRecord<C> rec)
        : sys_(&sys), rec_(std::move(rec)) {}

    void on_commit(const typename C::Pt& D) {
        if (state_ != State::await_commit) throw ProtoError("protocol order: unexpected commitment");
        if (!sys_->curve.on_curve(D)) throw ProtoError("commitment point is not on the curve");
        tr_.D = D;
        state_ = State::await_challenge;
    }

    // e uniform in {1, ..., 2^(t-1)}.
    Uint challenge(EntropySource& rng) {
        if (state_ != State::await_challenge)
            throw ProtoError("protocol order: challenge without a commitment");
        tr_.e = uniform_nonzero_below(rng, Uint(1).shl(rec_.t - 1).add(Uint(1)));
        state_ = State::await_response;
        return tr_.e;
    }

    bool on_response(const Uint& y) {
        if (state_ != State::await_response)
            throw ProtoError("protocol order: response without a challenge");
        tr_.y = y;
        tr_.accepted = verifier_check(*sys_, rec_, tr_.D, tr_.e, y);
        state_ = State::done;
        return tr_.accepted;
    }

    const Transcript<C>& transcript() const {
        if (state_ != State::done) throw ProtoError("transcript incomplete");
        return tr_;
    }

private:
    enum class State { await_commit, await_challenge, await_response, done };
    const CurveSystem<C>* sys_;
    EnrollmentRecord<C> rec_;
    Transcript<C> tr_;
    State state_ = State::await_commit;
};

// ---------------------------------------------------------------------------
// Special soundness: two accepting transcripts with the same commitment and
// different challenges reveal alpha = (y1 - y2) / (e2 - e1) mod l.

template <class C>
Uint extract_alpha_from_transcripts(const CurveSystem<C>& sys, const Transcript<C>& t1,
                                    const Transcript<C>& t2) {
    if (!t1.accepted || !t2.accepted)
        throw ProtoError("soundness extraction needs two accepting transcripts");
    if (!(t1.D == t2.D)) throw ProtoError("soundness extraction needs a shared commitment");
    if (t1.e == t2.e) throw ProtoError("soundness extraction needs distinct challenges");
    const Uint& l = sys.base_order;
    Uint dy = submod(t1.y, t2.y, l);
    Uint de = submod(t2.e, t1.e, l);
    return mulmod(dy, powmod(de, l.sub(Uint(2)), l), l);  // l is prime
}

// ---------------------------------------------------------------------------
// EC-ElGamal sealing of (B, s) to the verifier's public key, for enrollment
// over an untrusted channel. The byte secret s is XOR-masked with a key
// derived by Ext_k from the shared point.

template <class C>
struct ElGamalKeypair {
    Uint secret;         // in [1, l)
    typename C::Pt pub;  // secret * base
};

template <class C>
ElGamalKeypair<C> elgamal_keygen(const CurveSystem<C>& sys, EntropySource& rng) {
    Uint k = uniform_nonzero_below(rng, sys.base_order);
    return {k, scalar_mul(sys.curve, k, sys.base)};
}

template <class C>
struct EnrollmentCiphertext {
    typename C::Pt c1;                    // kP
    typename C::Pt c2;                    // B + k * pub
    std::vector<std::uint8_t> sealed_s;   // s XOR expand(Ext_k(k * pub))
};

namespace detail {
template <class C>
std::vector<std::uint8_t> elgamal_mask(const CurveSystem<C>& sys, const typename C::Pt& shared,
                                       std::size_t len) {
    auto key = extract_secret_bytes(sys, shared);
    return sha256_expand(key, len);
}
}  // namespace detail

template <class C>
EnrollmentCiphertext<C> encrypt_point_for_enrollment(const CurveSystem<C>& sys,
                                                     const typename C::Pt& B,
                                                     std::span<const std::uint8_t> s,
                                                     const typename C::Pt& verifier_pub,
                                                     EntropySource& rng) {
    if (!sys.curve.on_curve(verifier_pub) || sys.curve.is_identity(verifier_pub))
        throw ProtoError("verifier public key must be a non-identity curve point");
    Uint k;
    typename C::Pt shared;
    do {
        k = uniform_nonzero_below(rng, sys.base_order);
        shared = scalar_mul(sys.curve, k, verifier_pub);
    } while (sys.curve.is_identity(shared));

    EnrollmentCiphertext<C> ct;
    ct.c1 = scalar_mul(sys.curve, k, sys.base);
    ct.c2 = sys.curve.add(B, shared);
    auto mask = detail::elgamal_mask(sys, shared, s.size());
    ct.sealed_s.assign(s.begin(), s.end());
    for (std::size_t i = 0; i < ct.sealed_s.size(); ++i) ct.sealed_s[i] ^= mask[i];
    return ct;
}

template <class C>
std::pair<typename C::Pt, std::vector<std::uint8_t>> decrypt_enrollment(
    const CurveSystem<C>& sys, const EnrollmentCiphertext<C>& ct, const Uint& verifier_secret) {
    auto shared = scalar_mul(sys.curve, verifier_secret, ct.c1);
    if (sys.curve.is_identity(shared)) throw ProtoError("degenerate shared point in decryption");
    auto B = sys.curve.sub(ct.c2, shared);
    auto mask = detail::elgamal_mask(sys, shared, ct.sealed_s.size());
    auto s = ct.sealed_s;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] ^= mask[i];
    return {B, s};
}

// Expected byte length of the extracted secret for this parameter set.
template <class C>
std::size_t secret_byte_length(const CurveSystem<C>& sys) {
    if (sys.profile.extractor == ExtractorKind::lk) return (sys.profile.k + 7) / 8;
    if constexpr (std::is_same_v<typename C::Element, ExtFieldElement>) {
        return sys.profile.k * ((sys.curve.a().basis->p.bit_length() + 7) / 8);
    } else {
        throw ExtractorError("D_k requires an extension-field curve");
    }
}

// Verifier-side sanity checks on a received record; a wrong decryption key or
// tampered ciphertext surfaces here or as an identification that never accepts.
template <class C>
void validate_record(const CurveSystem<C>& sys, const EnrollmentRecord<C>& rec) {
    if (!sys.curve.on_curve(rec.B) || !sys.curve.on_curve(rec.C_point) ||
        !sys.curve.on_curve(rec.P))
        throw ProtoError("record points are not on the curve");
    if (sys.curve.is_identity(rec.B)) throw ProtoError("record B is the identity");
    if (sys.curve.is_identity(rec.P)) throw ProtoError("record P is the identity");
    if (rec.s.size() != secret_byte_length(sys))
        throw ProtoError("record secret has the wrong length");
    if (rec.t == 0 || rec.t > 128) throw ProtoError("record challenge parameter out of range");
}

}  // namespace ecid
