#pragma once

// Drives the identification state machines over a framed transport, in the
// fixed message order COMMIT -> CHALLENGE -> RESPONSE -> RESULT. A random
// 16-byte session id chosen by the prover is echoed on every frame; any
// mismatch aborts the session. Authentication failures (including tampered
// but well-framed data) yield a REJECT result; ordering violations, unknown
// claimants and session splices yield an ERROR frame and a protocol error.

#include <optional>
#include <string>
#include <variant>

#include "ecid/entropy.hpp"
#include "ecid/net.hpp"
#include "ecid/wire.hpp"

namespace ecid {

enum class Verdict { accepted, rejected, protocol_error };

using AnyTranscript = std::variant<Transcript<WeierstrassCurve<FieldElement>>,
                                   Transcript<BinaryCurve>,
                                   Transcript<EdwardsCurve<FieldElement>>,
                                   Transcript<WeierstrassCurve<ExtFieldElement>>>;

struct SessionResult {
    Verdict verdict = Verdict::protocol_error;
    std::string detail;
    std::string claimant_id;
    std::optional<AnyTranscript> transcript;  // verifier side, for offline audit

    int exit_code() const {
        switch (verdict) {
            case Verdict::accepted: return 0;
            case Verdict::rejected: return 1;
            default: return 2;
        }
    }
};

template <class Rec>
struct RecCurve;
template <class C>
struct RecCurve<EnrollmentRecord<C>> {
    using type = C;
};

namespace detail {

inline void send_msg(auto& transport, const WireMessage& msg) { transport.send_bytes(frame(msg)); }

inline void send_error(auto& transport, const SessionId& sid, WireCode code,
                       const std::string& text) {
    WireMessage msg{MsgKind::error, sid, {}};
    msg.body.push_back(static_cast<std::uint8_t>(code));
    put_str(msg.body, text);
    send_msg(transport, msg);
}

inline void send_result(auto& transport, const SessionId& sid, bool accepted, WireCode code) {
    WireMessage msg{MsgKind::result, sid, {}};
    msg.body.push_back(accepted ? 1 : 0);
    msg.body.push_back(static_cast<std::uint8_t>(code));
    send_msg(transport, msg);
}

inline std::string error_body_text(const WireMessage& msg) {
    try {
        BodyReader r(msg.body);
        auto code = r.u8();
        return "peer error (code " + std::to_string(code) + "): " + r.str();
    } catch (const Error&) {
        return "peer error (unparseable body)";
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Prover side.

template <class Transport, class C>
SessionResult run_identification_prover(Transport& transport, const CurveSystem<C>& sys,
                                        const EnrollmentRecord<C>& rec, const ProverSecret& secret,
                                        EntropySource& rng) {
    SessionResult result;
    result.claimant_id = rec.claimant_id;
    SessionId sid{};
    rng.fill(sid);

    try {
        ProverSession<C> session(sys, rec, secret);
        auto D = session.commit(rng);

        WireMessage commit{MsgKind::commit, sid, {}};
        detail::put_str(commit.body, rec.claimant_id);
        auto enc = encode_point(sys.curve, D);
        detail::put_blob(commit.body, enc);
        detail::send_msg(transport, commit);

        WireMessage challenge = deframe(transport);
        if (challenge.kind == MsgKind::error) {
            result.detail = detail::error_body_text(challenge);
            return result;
        }
        if (challenge.kind != MsgKind::challenge || challenge.session_id != sid) {
            result.detail = "unexpected frame while awaiting the challenge";
            return result;
        }
        detail::BodyReader cr(challenge.body);
        Uint e = Uint::from_bytes_be(cr.take(challenge_width(rec.t)));
        cr.expect_done();

        Uint y = session.respond(e);
        WireMessage response{MsgKind::response, sid, {}};
        auto yb = y.to_bytes_be(scalar_width(sys.base_order));
        response.body.insert(response.body.end(), yb.begin(), yb.end());
        detail::send_msg(transport, response);

        WireMessage res = deframe(transport);
        if (res.kind == MsgKind::error) {
            result.detail = detail::error_body_text(res);
            return result;
        }
        if (res.kind != MsgKind::result || res.session_id != sid) {
            result.detail = "unexpected frame while awaiting the result";
            return result;
        }
        detail::BodyReader rr(res.body);
        bool accepted = rr.u8() != 0;
        result.verdict = accepted ? Verdict::accepted : Verdict::rejected;
        result.detail = accepted ? "accepted" : "rejected by verifier";
        return result;
    } catch (const Error& e) {
        result.detail = e.what();
        return result;
    }
}

template <class Transport>
SessionResult run_identification_prover(Transport& transport, const Registry& reg,
                                        const AnyRecord& rec, const ProverSecret& secret,
                                        EntropySource& rng) {
    return std::visit(
        [&](const auto& r) {
            using C = typename RecCurve<std::decay_t<decltype(r)>>::type;
            const auto& sys = std::get<CurveSystem<C>>(reg.get(r.curve_name));
            return run_identification_prover(transport, sys, r, secret, rng);
        },
        rec);
}

// ---------------------------------------------------------------------------
// Verifier side: serves exactly one session (or one ENROLL push) on the
// given transport.

template <class Transport>
SessionResult run_identification_verifier(Transport& transport, EnrollmentStore& store,
                                          const Registry& reg, EntropySource& rng,
                                          const std::optional<std::filesystem::path>& enroll_sink =
                                              std::nullopt) {
    SessionResult result;
    SessionId sid{};
    try {
        WireMessage first = deframe(transport);
        sid = first.session_id;

        if (first.kind == MsgKind::enroll) {
            try {
                if (enroll_sink)
                    store.append(*enroll_sink, first.body);
                else
                    store.add_blob(first.body);
                detail::send_result(transport, sid, true, WireCode::ok);
                result.verdict = Verdict::accepted;
                result.detail = "enrollment record accepted";
            } catch (const Error& e) {
                detail::send_error(transport, sid, WireCode::malformed_body, e.what());
                result.detail = std::string("enrollment rejected: ") + e.what();
            }
            return result;
        }

        if (first.kind != MsgKind::commit) {
            detail::send_error(transport, sid, WireCode::protocol_order,
                               "expected COMMIT as the first frame");
            result.detail = "out-of-order first frame";
            return result;
        }

        detail::BodyReader br(first.body);
        std::string claimant = br.str();
        auto dbytes = br.blob();
        br.expect_done();
        result.claimant_id = claimant;

        auto found = store.find(claimant);
        if (!found) {
            detail::send_error(transport, sid, WireCode::unknown_claimant,
                               "no enrollment record for claimant");
            result.detail = "unknown claimant: " + claimant;
            return result;
        }

        return std::visit(
            [&](const auto& rec) -> SessionResult {
                using Rec = std::decay_t<decltype(rec)>;
                using C = typename RecCurve<Rec>::type;
                const auto& sys = std::get<CurveSystem<C>>(reg.get(rec.curve_name));

                VerifierSession<C> vs(sys, rec);
                typename C::Pt D;
                try {
                    D = decode_point(sys.curve, dbytes);
                    vs.on_commit(D);
                } catch (const Error& e) {
                    // Malformed or off-curve commitment: reject with the code.
                    detail::send_result(transport, sid, false, WireCode::off_curve);
                    result.verdict = Verdict::rejected;
                    result.detail = std::string("invalid commitment: ") + e.what();
                    return result;
                }

                Uint e = vs.challenge(rng);
                WireMessage challenge{MsgKind::challenge, sid, {}};
                auto eb = e.to_bytes_be(challenge_width(rec.t));
                challenge.body.insert(challenge.body.end(), eb.begin(), eb.end());
                detail::send_msg(transport, challenge);

                WireMessage response = deframe(transport);
                if (response.kind != MsgKind::response) {
                    detail::send_error(transport, sid, WireCode::protocol_order,
                                       "expected RESPONSE");
                    result.detail = "out-of-order frame while awaiting the response";
                    return result;
                }
                if (response.session_id != sid) {
                    detail::send_error(transport, sid, WireCode::session_mismatch,
                                       "response from a different session");
                    result.detail = "session id mismatch on RESPONSE";
                    return result;
                }
                detail::BodyReader rr(response.body);
                Uint y;
                bool accepted = false;
                WireCode code = WireCode::ok;
                try {
                    y = Uint::from_bytes_be(rr.take(scalar_width(sys.base_order)));
                    rr.expect_done();
                    accepted = vs.on_response(y);
                } catch (const Error& ex) {
                    // Tampered-but-framed responses are authentication failures.
                    accepted = false;
                    code = WireCode::malformed_body;
                    result.detail = std::string("response rejected: ") + ex.what();
                }
                detail::send_result(transport, sid, accepted, code);
                result.verdict = accepted ? Verdict::accepted : Verdict::rejected;
                if (result.detail.empty())
                    result.detail = accepted ? "accepted" : "rejected";
                if (code == WireCode::ok) result.transcript = vs.transcript();
                return result;
            },
            *found);
    } catch (const Error& e) {
        result.detail = e.what();
        try {
            detail::send_error(transport, sid, WireCode::internal, e.what());
        } catch (...) {
        }
        return result;
    }
}

// Offline transcript replay: recomputes the verdict with verifier_check.
inline bool replay_transcript(const Registry& reg, const AnyRecord& rec,
                              const AnyTranscript& tr) {
    return std::visit(
        [&](const auto& r) -> bool {
            using Rec = std::decay_t<decltype(r)>;
            using C = typename RecCurve<Rec>::type;
            const auto& sys = std::get<CurveSystem<C>>(reg.get(r.curve_name));
            const auto& t = std::get<Transcript<C>>(tr);
            try {
                return verifier_check(sys, r, t.D, t.e, t.y);
            } catch (const Error&) {
                return false;
            }
        },
        rec);
}

}  // namespace ecid
