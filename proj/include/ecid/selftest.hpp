#pragma once

// The exhaustive desk-scale verification suites: group-law oracle equivalence,
// Hasse windows, scalar-multiplication oracles, encoding sweeps, extractor
// diagnostics, protocol completeness/soundness, the impersonation Monte
// Carlo, and serialization round-trips. `ecid selftest` runs these; the
// acceptance binary runs them plus the process-level end-to-end checks.

#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ecid/idproto.hpp"
#include "ecid/session.hpp"
#include "ecid/wire.hpp"

namespace ecid::selftest {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

template <class C>
typename C::Pt repeated_add(const C& curve, std::uint64_t k, const typename C::Pt& P) {
    auto acc = curve.identity();
    for (std::uint64_t i = 0; i < k; ++i) acc = curve.add(acc, P);
    return acc;
}

// All points of a desk-scale curve by coordinate scan (plus infinity where
// the model has it).
template <class C>
std::vector<typename C::Pt> all_points(const C& curve) {
    std::vector<typename C::Pt> pts;
    if constexpr (!std::is_same_v<C, EdwardsCurve<FieldElement>>) pts.push_back(curve.identity());
    const auto& sample =
        [&]() -> const auto& {
        if constexpr (std::is_same_v<C, EdwardsCurve<FieldElement>>) return curve.d();
        else return curve.a();
    }();
    fe_for_each(sample, [&](const auto& x) {
        fe_for_each(sample, [&](const auto& y) {
            auto P = C::Pt::affine(x, y);
            if (curve.on_curve(P)) pts.push_back(P);
        });
    });
    return pts;
}

template <class C>
bool group_law_sweep(const CurveSystem<C>& sys, std::string& detail) {
    auto pts = all_points(sys.curve);
    if (Uint(pts.size()) != sys.group_order) {
        detail = sys.name + ": point scan found " + std::to_string(pts.size()) + " points, expected " +
                 sys.group_order.to_dec();
        return false;
    }
    for (const auto& P : pts)
        for (const auto& Q : pts) {
            auto PQ = sys.curve.add(P, Q);
            if (!sys.curve.on_curve(PQ)) {
                detail = sys.name + ": sum left the curve";
                return false;
            }
            if (!(PQ == sys.curve.add(Q, P))) {
                detail = sys.name + ": commutativity failed";
                return false;
            }
            for (const auto& R : pts) {
                if (!(sys.curve.add(PQ, R) == sys.curve.add(P, sys.curve.add(Q, R)))) {
                    detail = sys.name + ": associativity failed";
                    return false;
                }
            }
        }
    return true;
}

}  // namespace detail

// Criterion 1: exhaustive associativity/commutativity on toy17, toy16b, toy19ed.
inline CheckResult check_group_law_oracle(const Registry& reg) {
    CheckResult r{"group-law oracle equivalence (toy17, toy16b, toy19ed)", true, ""};
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    if (!detail::group_law_sweep(std::get<PrimeSystem>(reg.get("toy17")), detail) ||
        !detail::group_law_sweep(std::get<BinarySystem>(reg.get("toy16b")), detail) ||
        !detail::group_law_sweep(std::get<EdwardsSystem>(reg.get("toy19ed")), detail)) {
        r.pass = false;
        r.detail = detail;
        return r;
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    r.detail = "all triples and pairs, " + std::to_string(ms.count()) + " ms";
    if (ms.count() >= 5000) {
        r.pass = false;
        r.detail += " (budget 5000 ms exceeded)";
    }
    return r;
}

// Criterion 2: Hasse bound over every non-singular curve, p in {11,13,17,19,23}.
inline CheckResult check_hasse_window() {
    CheckResult r{"Hasse bound over all (a,b), p in {11,13,17,19,23}", true, ""};
    std::size_t curves = 0;
    for (std::uint64_t p : {11ull, 13ull, 17ull, 19ull, 23ull}) {
        for (std::uint64_t a = 0; a < p; ++a)
            for (std::uint64_t b = 0; b < p; ++b) {
                WeierstrassCurve<FieldElement> E(fp_make(Uint(a), Uint(p)), fp_make(Uint(b), Uint(p)));
                try {
                    E.validate();
                } catch (const CurveError&) {
                    continue;
                }
                ++curves;
                Uint N = naive_point_count(E);
                Uint p1 = Uint(p + 1);
                Uint diff = N >= p1 ? N.sub(p1) : p1.sub(N);
                if (diff.mul(diff) > Uint(4 * p)) {
                    r.pass = false;
                    r.detail = "violation at p=" + std::to_string(p) + " a=" + std::to_string(a) +
                               " b=" + std::to_string(b);
                    return r;
                }
            }
    }
    r.detail = std::to_string(curves) + " curves, zero violations";
    return r;
}

// Criterion 3: scalar_mul equals k-fold repeated addition for k in [0, 2l].
inline CheckResult check_scalar_oracle(const Registry& reg) {
    CheckResult r{"scalar multiplication vs repeated addition, k in [0, 2l]", true, ""};
    std::size_t checks = 0;
    auto sweep = [&](const auto& sys) {
        const std::uint64_t l = sys.base_order.low_u64();
        auto acc = sys.curve.identity();
        for (std::uint64_t k = 0; k <= 2 * l; ++k) {
            if (!(scalar_mul(sys.curve, Uint(k), sys.base) == acc)) {
                r.pass = false;
                r.detail = sys.name + ": mismatch at k=" + std::to_string(k);
                return;
            }
            acc = sys.curve.add(acc, sys.base);
            ++checks;
        }
    };
    for (const std::string name : {"toy17", "toy16b", "toy19ed", "toy25w", "toy125w"}) {
        std::visit([&](const auto& sys) { sweep(sys); }, reg.get(name));
        if (!r.pass) return r;
    }
    r.detail = std::to_string(checks) + " scalar values, zero mismatches";
    return r;
}

// Criterion 4: Icart totality and on-curve over F_11, F_17, F_23.
inline CheckResult check_icart_sweep() {
    CheckResult r{"Icart totality sweep over F_11, F_17, F_23 (3+ curves each)", true, ""};
    std::size_t encoded = 0;
    for (std::uint64_t q : {11ull, 17ull, 23ull}) {
        int curves_done = 0;
        for (std::uint64_t a = 1; a < q && curves_done < 4; ++a) {
            std::uint64_t b = (3 * a + 1) % q;
            WeierstrassCurve<FieldElement> E(fp_make(Uint(a), Uint(q)), fp_make(Uint(b), Uint(q)));
            try {
                E.validate();
            } catch (const CurveError&) {
                continue;
            }
            ++curves_done;
            for (std::uint64_t u = 0; u < q; ++u) {
                auto P = icart_encode(fp_make(Uint(u), Uint(q)), E);
                if (!E.on_curve(P) || (u == 0) != E.is_identity(P)) {
                    r.pass = false;
                    r.detail = "failure at q=" + std::to_string(q) + " u=" + std::to_string(u);
                    return r;
                }
                ++encoded;
            }
        }
        if (curves_done < 3) {
            r.pass = false;
            r.detail = "fewer than 3 curves available at q=" + std::to_string(q);
            return r;
        }
    }
    r.detail = std::to_string(encoded) + " encodings, all on-curve, f(0) = identity";
    return r;
}

// Criterion 5: Elligator lemma sweep at q = 19 and 31.
inline CheckResult check_elligator_sweep() {
    CheckResult r{"Elligator sweep at q in {19, 31}: on-curve, phi(+-1), iota", true, ""};
    for (std::uint64_t q : {19ull, 31ull}) {
        auto ep = elligator_setup(fp_make(Uint(1), Uint(q)));
        EdwardsCurve<FieldElement> E(ep.d);
        E.validate();
        auto id = E.identity();
        if (!(elligator_phi(fp_make(Uint(1), Uint(q)), ep) == id) ||
            !(elligator_phi(fp_make(Uint(q - 1), Uint(q)), ep) == id)) {
            r.pass = false;
            r.detail = "phi(+-1) != (0,1) at q=" + std::to_string(q);
            return r;
        }
        std::set<std::pair<std::string, std::string>> phi_img, iota_img;
        for (std::uint64_t t = 0; t < q; ++t) {
            auto P = elligator_phi(fp_make(Uint(t), Uint(q)), ep);
            if (!E.on_curve(P)) {
                r.pass = false;
                r.detail = "off-curve phi output at q=" + std::to_string(q) + " t=" + std::to_string(t);
                return r;
            }
            phi_img.emplace(P.x.value.to_dec(), P.y.value.to_dec());
        }
        const std::size_t b = elligator_bit_length(Uint(q));
        for (std::uint64_t sigma = 0; sigma <= (q - 1) / 2; ++sigma) {
            auto P = elligator_iota(Bits::make(Uint(sigma), b), ep);
            iota_img.emplace(P.x.value.to_dec(), P.y.value.to_dec());
        }
        if (iota_img.size() != (q + 1) / 2) {
            r.pass = false;
            r.detail = "iota not injective at q=" + std::to_string(q);
            return r;
        }
        if (iota_img != phi_img) {
            r.pass = false;
            r.detail = "iota(S) != phi(F_q) at q=" + std::to_string(q);
            return r;
        }
    }
    r.detail = "all phi(t) on-curve; iota injective with #S = (q+1)/2; iota(S) = phi(F_q)";
    return r;
}

// Criterion 6: exact extractor statistics within the lemma bounds, and the
// worked boundary cases of the parameter validator.
inline CheckResult check_extractor_bounds(const Registry& reg) {
    CheckResult r{"extractor oracle bounds and validator boundary cases", true, ""};

    // frozen boundary cases
    ExtractorParams lk{ExtractorKind::lk, 128, 80, 256, 255, 0};
    if (check_extractor_params(lk).ok || check_extractor_params(lk).max_k != 80) {
        r.pass = false;
        r.detail = "L_k boundary case (max k = 80) failed";
        return r;
    }
    ExtractorParams dk{ExtractorKind::dk, 3, 80, 8, 252, 32};
    if (check_extractor_params(dk).ok || check_extractor_params(dk).max_k != 2) {
        r.pass = false;
        r.detail = "D_k boundary case (max k = 2) failed";
        return r;
    }

    // exact statistics on toy subgroups
    const auto& t17 = std::get<PrimeSystem>(reg.get("toy17"));
    auto sub17 = enumerate_subgroup(t17.curve, t17.base);
    for (std::size_t k = 1; k <= 3; ++k) {
        ExtractorParams p{ExtractorKind::lk, k, 1, 5, 5, 0};
        auto rep = stat_distance_oracle(t17.curve, sub17, p);
        if (!delta_within_bound(rep.delta, lk_delta_bound_squared(k, 5, 5))) {
            r.pass = false;
            r.detail = "toy17 L_" + std::to_string(k) + " exceeded min(1, lemma bound)";
            return r;
        }
    }
    const auto& ted = std::get<EdwardsSystem>(reg.get("toy19ed"));
    auto subed = enumerate_subgroup(ted.curve, ted.base);
    auto reped = stat_distance_oracle(ted.curve, subed, ExtractorParams{ExtractorKind::lk, 1, 1, 5, 3, 0});
    if (!delta_within_bound(reped.delta, lk_delta_bound_squared(1, 5, 3))) {
        r.pass = false;
        r.detail = "toy19ed L_1 exceeded min(1, lemma bound)";
        return r;
    }

    auto check_dk = [&](const ExtSystem& sys, std::size_t k) {
        auto sub = enumerate_subgroup(sys.curve, sys.base);
        const Uint p = sys.curve.a().basis->p;
        const std::size_t n = sys.curve.a().basis->degree();
        ExtractorParams params{ExtractorKind::dk, k, 1, n, sys.base_order.bit_length(),
                               p.bit_length()};
        auto rep = stat_distance_oracle(sys.curve, sub, params);
        Uint G(static_cast<std::uint64_t>(sub.size()));
        return dk_collision_within_bound(rep.collision, p, k, n, G) &&
               dk_delta_within_bound(rep.delta, p, k, n, G);
    };
    if (!check_dk(std::get<ExtSystem>(reg.get("toy25w")), 1) ||
        !check_dk(std::get<ExtSystem>(reg.get("toy125w")), 1) ||
        !check_dk(std::get<ExtSystem>(reg.get("toy125w")), 2)) {
        r.pass = false;
        r.detail = "D_k statistics exceeded min(1, lemma bound)";
        return r;
    }
    r.detail = "exact delta/collision within min(1, bound) on all toy subgroups; max-k cases exact";
    return r;
}

// Criterion 7: exhaustive completeness and the single-bit-perturbation sweep.
inline CheckResult check_protocol_completeness(const Registry& reg) {
    CheckResult r{"protocol completeness + y-perturbation exactness (toy17)", true, ""};
    const auto& sys = std::get<PrimeSystem>(reg.get("toy17"));
    SeededEntropy rng("acceptance-completeness");
    auto [rec, sec] = enroll(make_biometric(std::vector<std::uint8_t>{'a', 'l', 'i', 'c', 'e'}),
                             sys, "alice", rng);
    const std::uint64_t l = sys.base_order.low_u64();
    auto W_honest = scalar_mul(sys.curve, sec.alpha, rec.B);

    std::size_t honest = 0, measured_accepts = 0, counted_accepts = 0, perturbed = 0;
    for (std::uint64_t rr = 1; rr < l; ++rr) {
        auto D = sys.curve.sub(scalar_mul(sys.curve, Uint(rr), rec.P),
                               scalar_mul(sys.curve, sec.alpha, rec.B));
        for (std::uint64_t e = 1; e <= 4; ++e) {
            Uint y = submod(Uint(rr), mulmod(Uint(e), sec.alpha, sys.base_order), sys.base_order);
            if (!verifier_check(sys, rec, D, Uint(e), y)) {
                r.pass = false;
                r.detail = "honest transcript rejected at r=" + std::to_string(rr) +
                           " e=" + std::to_string(e);
                return r;
            }
            ++honest;
            for (std::size_t bit = 0; bit < sys.base_order.bit_length(); ++bit) {
                Uint y_bad = y.xor_with(Uint(1).shl(bit));
                ++perturbed;
                bool measured = false;
                try {
                    measured = verifier_check(sys, rec, D, Uint(e), y_bad);
                } catch (const ProtoError&) {
                    measured = false;  // y' >= l: malformed, rejected
                }
                bool counted = false;
                if (y_bad < sys.base_order) {
                    Uint delta = submod(y_bad, y, sys.base_order);
                    auto W = sys.curve.add(W_honest, scalar_mul(sys.curve, delta, rec.P));
                    counted = !sys.curve.is_identity(W) && extract_secret_bytes(sys, W) == rec.s;
                }
                if (measured != counted) {
                    r.pass = false;
                    r.detail = "measured/counted mismatch at r=" + std::to_string(rr);
                    return r;
                }
                if (measured) ++measured_accepts;
                if (counted) ++counted_accepts;
            }
        }
    }
    if (honest != 72) {
        r.pass = false;
        r.detail = "expected 72 honest transcripts, saw " + std::to_string(honest);
        return r;
    }
    std::ostringstream os;
    os << honest << " honest accepts; " << perturbed << " perturbations, " << measured_accepts
       << " collision-set accepts (= counted " << counted_accepts << ")";
    r.detail = os.str();
    return r;
}

// Criterion 8: special soundness across every accepting pair sharing D.
inline CheckResult check_special_soundness(const Registry& reg) {
    CheckResult r{"special soundness: alpha recovered from all transcript pairs", true, ""};
    const auto& sys = std::get<PrimeSystem>(reg.get("toy17"));
    SeededEntropy rng("acceptance-soundness");
    auto [rec, sec] = enroll(make_biometric(std::vector<std::uint8_t>{'b', 'o', 'b'}), sys, "bob",
                             rng);
    using Tr = Transcript<WeierstrassCurve<FieldElement>>;
    const std::uint64_t l = sys.base_order.low_u64();
    std::size_t pairs = 0;
    for (std::uint64_t rr = 1; rr < l; ++rr) {
        auto D = sys.curve.sub(scalar_mul(sys.curve, Uint(rr), rec.P),
                               scalar_mul(sys.curve, sec.alpha, rec.B));
        std::vector<Tr> trs;
        for (std::uint64_t e = 1; e <= 4; ++e) {
            Uint y = submod(Uint(rr), mulmod(Uint(e), sec.alpha, sys.base_order), sys.base_order);
            trs.push_back(Tr{D, Uint(e), y, verifier_check(sys, rec, D, Uint(e), y)});
        }
        for (std::size_t i = 0; i < trs.size(); ++i)
            for (std::size_t j = 0; j < trs.size(); ++j) {
                if (i == j) continue;
                if (!(extract_alpha_from_transcripts(sys, trs[i], trs[j]) == sec.alpha)) {
                    r.pass = false;
                    r.detail = "alpha not recovered at r=" + std::to_string(rr);
                    return r;
                }
                ++pairs;
            }
    }
    r.detail = std::to_string(pairs) + " ordered pairs, alpha exact every time";
    return r;
}

// Criterion 9: impersonation Monte Carlo without alpha, t = 8, 10^4 attempts.
inline CheckResult check_impersonation_monte_carlo(const Registry& reg) {
    CheckResult r{"impersonation Monte Carlo (10^4 attempts, t = 8)", true, ""};
    auto t0 = std::chrono::steady_clock::now();
    const auto& sys = std::get<PrimeSystem>(reg.get("toy17"));
    SeededEntropy rng("acceptance-montecarlo");
    auto [rec0, sec] = enroll(make_biometric(std::vector<std::uint8_t>{'e', 'v', 'e'}), sys, "eve",
                              rng);
    auto rec = rec0;
    rec.t = 8;

    // exhaustive preimage count of s in the group
    auto group = enumerate_subgroup(sys.curve, sys.base);
    std::size_t preimages = 0;
    for (const auto& W : group) {
        if (sys.curve.is_identity(W)) continue;
        if (extract_secret_bytes(sys, W) == rec.s) ++preimages;
    }
    const double l = static_cast<double>(sys.base_order.low_u64());
    const double p_hat = static_cast<double>(preimages) / l;
    const int trials = 10000;
    const double sigma = std::sqrt(p_hat * (1.0 - p_hat) / trials);

    int accepts = 0;
    for (int i = 0; i < trials; ++i) {
        // adversary without alpha: random commitment dP, random response
        Uint d = uniform_below(rng, sys.base_order);
        auto D = scalar_mul(sys.curve, d, sys.base);
        Uint y = uniform_below(rng, sys.base_order);
        Uint e = uniform_nonzero_below(rng, Uint(129));  // {1..128}
        if (verifier_check(sys, rec, D, e, y)) ++accepts;
    }
    const double rate = static_cast<double>(accepts) / trials;
    const double bound = p_hat + 3 * sigma;
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    std::ostringstream os;
    os << accepts << "/" << trials << " accepts (rate " << rate << "), bound " << bound << " ("
       << preimages << "/" << static_cast<int>(l) << " + 3 sigma), " << ms.count() << " ms";
    r.detail = os.str();
    if (rate > bound) r.pass = false;
    if (ms.count() >= 30000) {
        r.pass = false;
        r.detail += " (budget 30 s exceeded)";
    }
    return r;
}

// Criterion 11: serialization fuzz and point round-trips.
inline CheckResult check_serialization(const Registry& reg) {
    CheckResult r{"serialization: 10^5 fuzzed frames, exact point round-trips", true, ""};

    std::mt19937_64 mt(0xacce97ed);
    int decoded = 0;
    for (int iter = 0; iter < 100000; ++iter) {
        std::vector<std::uint8_t> junk(mt() % 96);
        for (auto& b : junk) b = static_cast<std::uint8_t>(mt());
        if (iter % 2 == 0 && junk.size() >= 5) {
            std::size_t len = junk.size() - 4;
            junk[0] = static_cast<std::uint8_t>(len >> 24);
            junk[1] = static_cast<std::uint8_t>(len >> 16);
            junk[2] = static_cast<std::uint8_t>(len >> 8);
            junk[3] = static_cast<std::uint8_t>(len);
            junk[4] %= 8;
        }
        struct Src final : ByteSource {
            std::span<const std::uint8_t> d;
            std::size_t pos = 0;
            std::size_t read_some(std::span<std::uint8_t> out) override {
                std::size_t n = std::min(out.size(), d.size() - pos);
                std::copy_n(d.begin() + static_cast<std::ptrdiff_t>(pos), n, out.begin());
                pos += n;
                return n;
            }
        } src;
        src.d = junk;
        try {
            auto msg = deframe(src);
            auto re = frame(msg);
            if (!std::equal(re.begin(), re.end(), junk.begin())) {
                r.pass = false;
                r.detail = "silent re-canonicalization on a fuzzed frame";
                return r;
            }
            ++decoded;
        } catch (const Error&) {
        }
    }

    std::size_t points = 0;
    auto roundtrip = [&](const auto& sys) {
        auto pts = detail::all_points(sys.curve);
        for (const auto& P : pts) {
            auto enc = encode_point(sys.curve, P);
            if (!(decode_point(sys.curve, enc) == P) ||
                encode_point(sys.curve, decode_point(sys.curve, enc)) != enc) {
                r.pass = false;
                return;
            }
            ++points;
        }
    };
    for (const std::string name : {"toy17", "toy16b", "toy19ed", "toy25w", "toy125w"}) {
        std::visit([&](const auto& sys) { roundtrip(sys); }, reg.get(name));
        if (!r.pass) {
            r.detail = "point round-trip failed on " + name;
            return r;
        }
    }
    r.detail = std::to_string(decoded) + " frames decoded cleanly; " + std::to_string(points) +
               " points round-tripped exactly";
    return r;
}

inline std::vector<CheckResult> run_desk_checks(const Registry& reg) {
    return {
        check_group_law_oracle(reg),      check_hasse_window(),
        check_scalar_oracle(reg),         check_icart_sweep(),
        check_elligator_sweep(),          check_extractor_bounds(reg),
        check_protocol_completeness(reg), check_special_soundness(reg),
        check_impersonation_monte_carlo(reg), check_serialization(reg),
    };
}

}  // namespace ecid::selftest
