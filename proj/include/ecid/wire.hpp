#pragma once

// Byte-exact serialization: point encoding (tag byte + fixed-width big-endian
// coordinates), length-prefixed message framing, enrollment record blobs and
// the append-only record store. Decoding is strictly canonical: any byte
// string either fails with a coded error or decodes to a value that re-encodes
// to exactly the input bytes.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ecid/idproto.hpp"

namespace ecid {

enum class WireCode : std::uint8_t {
    ok = 0,
    bad_tag = 1,
    bad_width = 2,
    off_curve = 3,
    oversize = 4,
    unknown_kind = 5,
    truncated = 6,
    protocol_order = 7,
    unknown_claimant = 8,
    session_mismatch = 9,
    malformed_body = 10,
    timeout = 11,
    internal = 12,
};

class WireError : public Error {
public:
    WireError(WireCode code, const std::string& what) : Error(what), code_(code) {}
    WireCode code() const { return code_; }

private:
    WireCode code_;
};

// ---------------------------------------------------------------------------
// Point codec: 0x00 = point at infinity (Weierstrass models only; the Edwards
// identity (0,1) is an ordinary affine point), 0x04 = affine, uncompressed.

namespace detail {

inline Uint canonical_uint(std::span<const std::uint8_t> bytes, const Uint& bound,
                           const char* what) {
    Uint v = Uint::from_bytes_be(bytes);
    if (v >= bound) throw WireError(WireCode::bad_width, std::string(what) + " not canonical");
    return v;
}

inline FieldElement element_from_bytes(const FieldElement& sample, std::span<const std::uint8_t> b) {
    return {canonical_uint(b, sample.modulus, "field element"), sample.modulus};
}

inline Gf2mElement element_from_bytes(const Gf2mElement& sample, std::span<const std::uint8_t> b) {
    return {canonical_uint(b, Uint(1).shl(gf2m_degree_bound(sample)), "binary element"),
            sample.reduction};
}

inline ExtFieldElement element_from_bytes(const ExtFieldElement& sample,
                                          std::span<const std::uint8_t> b) {
    const std::size_t w = (sample.basis->p.bit_length() + 7) / 8;
    std::vector<Uint> coords;
    for (std::size_t i = 0; i < sample.basis->degree(); ++i)
        coords.push_back(canonical_uint(b.subspan(i * w, w), sample.basis->p, "coordinate"));
    return {std::move(coords), sample.basis};
}

template <class C>
const typename C::Element& sample_element(const C& curve) {
    if constexpr (std::is_same_v<C, EdwardsCurve<typename C::Element>>)
        return curve.d();
    else
        return curve.a();
}

template <class C>
constexpr bool has_infinity_encoding() {
    return !std::is_same_v<C, EdwardsCurve<FieldElement>> &&
           !std::is_same_v<C, EdwardsCurve<ExtFieldElement>>;
}

}  // namespace detail

template <class C>
std::size_t encoded_point_size(const C& curve) {
    return 1 + 2 * fe_byte_width(detail::sample_element(curve));
}

template <class C>
std::vector<std::uint8_t> encode_point(const C& curve, const typename C::Pt& P) {
    if (curve.is_identity(P) && detail::has_infinity_encoding<C>()) return {0x00};
    std::vector<std::uint8_t> out{0x04};
    auto x = fe_to_bytes(P.x), y = fe_to_bytes(P.y);
    out.insert(out.end(), x.begin(), x.end());
    out.insert(out.end(), y.begin(), y.end());
    return out;
}

template <class C>
typename C::Pt decode_point(const C& curve, std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw WireError(WireCode::truncated, "empty point encoding");
    const std::size_t w = fe_byte_width(detail::sample_element(curve));
    if (bytes[0] == 0x00) {
        if (!detail::has_infinity_encoding<C>())
            throw WireError(WireCode::bad_tag, "infinity tag is invalid for Edwards points");
        if (bytes.size() != 1) throw WireError(WireCode::bad_width, "identity encoding has trailing bytes");
        return curve.identity();
    }
    if (bytes[0] != 0x04) throw WireError(WireCode::bad_tag, "unknown point tag");
    if (bytes.size() != 1 + 2 * w)
        throw WireError(WireCode::bad_width, "point encoding has the wrong width");
    const auto& sample = detail::sample_element(curve);
    auto x = detail::element_from_bytes(sample, bytes.subspan(1, w));
    auto y = detail::element_from_bytes(sample, bytes.subspan(1 + w, w));
    auto P = C::Pt::affine(std::move(x), std::move(y));
    if (curve.strict() && !curve.on_curve(P))
        throw WireError(WireCode::off_curve, "decoded point is not on the curve");
    return P;
}

// ---------------------------------------------------------------------------
// Message framing: u32 BE length of (kind + session id + body), then 1 byte
// kind, 16 bytes session id, body. Total frame capped at 64 KiB.

enum class MsgKind : std::uint8_t {
    enroll = 1,
    commit = 2,
    challenge = 3,
    response = 4,
    result = 5,
    error = 6,
};

using SessionId = std::array<std::uint8_t, 16>;

struct WireMessage {
    MsgKind kind = MsgKind::error;
    SessionId session_id{};
    std::vector<std::uint8_t> body;
};

inline constexpr std::size_t kMaxFrameBytes = 64 * 1024;

inline std::vector<std::uint8_t> frame(const WireMessage& msg) {
    const std::size_t len = 1 + 16 + msg.body.size();
    if (4 + len > kMaxFrameBytes) throw WireError(WireCode::oversize, "frame exceeds 64 KiB");
    std::vector<std::uint8_t> out;
    out.reserve(4 + len);
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
    out.push_back(static_cast<std::uint8_t>(msg.kind));
    out.insert(out.end(), msg.session_id.begin(), msg.session_id.end());
    out.insert(out.end(), msg.body.begin(), msg.body.end());
    return out;
}

// Minimal blocking byte source; read_some returns 0 at end of stream.
class ByteSource {
public:
    virtual ~ByteSource() = default;
    virtual std::size_t read_some(std::span<std::uint8_t> out) = 0;
};

inline void read_exact(ByteSource& src, std::span<std::uint8_t> out) {
    std::size_t got = 0;
    while (got < out.size()) {
        std::size_t n = src.read_some(out.subspan(got));
        if (n == 0) throw WireError(WireCode::truncated, "stream ended mid-frame");
        got += n;
    }
}

// Reads one frame. Unknown kinds consume the whole frame before throwing, so
// the stream stays usable; oversize declarations abort before consuming.
inline WireMessage deframe(ByteSource& src) {
    std::array<std::uint8_t, 4> lenb{};
    std::size_t first = src.read_some(lenb);
    if (first == 0) throw WireError(WireCode::truncated, "end of stream");
    if (first < 4) read_exact(src, std::span(lenb).subspan(first));
    std::size_t len = (std::size_t(lenb[0]) << 24) | (std::size_t(lenb[1]) << 16) |
                      (std::size_t(lenb[2]) << 8) | std::size_t(lenb[3]);
    if (4 + len > kMaxFrameBytes) throw WireError(WireCode::oversize, "declared frame too large");
    if (len < 17) throw WireError(WireCode::truncated, "frame shorter than its fixed header");

    std::vector<std::uint8_t> payload(len);
    read_exact(src, payload);
    WireMessage msg;
    std::uint8_t kind = payload[0];
    if (kind < 1 || kind > 6) throw WireError(WireCode::unknown_kind, "unknown message kind");
    msg.kind = static_cast<MsgKind>(kind);
    std::copy(payload.begin() + 1, payload.begin() + 17, msg.session_id.begin());
    msg.body.assign(payload.begin() + 17, payload.end());
    return msg;
}

// ---------------------------------------------------------------------------
// Body helpers (fixed-width integers sized by l and t; length-prefixed strings).

namespace detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::size_t v) {
    if (v > 0xFFFF) throw WireError(WireCode::oversize, "length field overflow");
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

class BodyReader {
public:
    explicit BodyReader(std::span<const std::uint8_t> b) : b_(b) {}

    std::span<const std::uint8_t> take(std::size_t n) {
        if (pos_ + n > b_.size()) throw WireError(WireCode::malformed_body, "body too short");
        auto s = b_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t u16() {
        auto s = take(2);
        return (std::size_t(s[0]) << 8) | s[1];
    }
    std::uint8_t u8() { return take(1)[0]; }
    std::uint32_t u32() {
        auto s = take(4);
        return (std::uint32_t(s[0]) << 24) | (std::uint32_t(s[1]) << 16) |
               (std::uint32_t(s[2]) << 8) | s[3];
    }
    std::string str() {
        auto s = take(u16());
        return std::string(s.begin(), s.end());
    }
    std::vector<std::uint8_t> blob() {
        auto s = take(u16());
        return std::vector<std::uint8_t>(s.begin(), s.end());
    }
    bool done() const { return pos_ == b_.size(); }
    void expect_done() const {
        if (!done()) throw WireError(WireCode::malformed_body, "trailing bytes in body");
    }

private:
    std::span<const std::uint8_t> b_;
    std::size_t pos_ = 0;
};

inline void put_str(std::vector<std::uint8_t>& out, const std::string& s) {
    put_u16(out, s.size());
    out.insert(out.end(), s.begin(), s.end());
}
inline void put_blob(std::vector<std::uint8_t>& out, std::span<const std::uint8_t> b) {
    put_u16(out, b.size());
    out.insert(out.end(), b.begin(), b.end());
}

}  // namespace detail

// Challenge and response travel as fixed-width big-endian integers sized by t
// and by the bit length of l.
inline std::size_t challenge_width(std::size_t t) { return (t + 7) / 8; }
inline std::size_t scalar_width(const Uint& l) { return (l.bit_length() + 7) / 8; }

// ---------------------------------------------------------------------------
// Enrollment record blobs. Plaintext layout (flags = 0):
//   "ECRC" ver=1 flags | curve | claimant | t | kind k e | B | s | P | C
// Sealed layout (flags = 1) replaces B and s with the ElGamal triple:
//   ... | c1 | c2 | sealed_s | P | C

namespace detail {
template <class C>
void put_point(std::vector<std::uint8_t>& out, const C& curve, const typename C::Pt& P) {
    auto enc = encode_point(curve, P);
    put_u16(out, enc.size());
    out.insert(out.end(), enc.begin(), enc.end());
}
template <class C>
typename C::Pt take_point(BodyReader& r, const C& curve) {
    return decode_point(curve, r.take(r.u16()));
}
}  // namespace detail

template <class C>
struct SealedRecord {
    std::string claimant_id;
    std::string curve_name;
    EnrollmentCiphertext<C> ct;
    typename C::Pt P;
    typename C::Pt C_point;
    std::size_t t = 3;
    ExtractorParams extractor;
};

namespace detail {
inline void put_record_header(std::vector<std::uint8_t>& out, const std::string& curve_name,
                       const std::string& claimant_id, std::size_t t,
                       const ExtractorParams& ex, bool sealed) {
    out.push_back('E');
    out.push_back('C');
    out.push_back('R');
    out.push_back('C');
    out.push_back(1);
    out.push_back(sealed ? 1 : 0);
    put_str(out, curve_name);
    put_str(out, claimant_id);
    out.push_back(static_cast<std::uint8_t>(t));
    out.push_back(ex.kind == ExtractorKind::lk ? 0 : 1);
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(ex.k >> (8 * i)));
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(ex.e >> (8 * i)));
}
}  // namespace detail

template <class C>
std::vector<std::uint8_t> serialize_record(const CurveSystem<C>& sys,
                                           const EnrollmentRecord<C>& rec) {
    std::vector<std::uint8_t> out;
    detail::put_record_header(out, rec.curve_name, rec.claimant_id, rec.t, rec.extractor, false);
    detail::put_point(out, sys.curve, rec.B);
    detail::put_blob(out, rec.s);
    detail::put_point(out, sys.curve, rec.P);
    detail::put_point(out, sys.curve, rec.C_point);
    return out;
}

template <class C>
std::vector<std::uint8_t> serialize_sealed_record(const CurveSystem<C>& sys,
                                                  const SealedRecord<C>& rec) {
    std::vector<std::uint8_t> out;
    detail::put_record_header(out, rec.curve_name, rec.claimant_id, rec.t, rec.extractor, true);
    detail::put_point(out, sys.curve, rec.ct.c1);
    detail::put_point(out, sys.curve, rec.ct.c2);
    detail::put_blob(out, rec.ct.sealed_s);
    detail::put_point(out, sys.curve, rec.P);
    detail::put_point(out, sys.curve, rec.C_point);
    return out;
}

using AnyRecord = std::variant<EnrollmentRecord<WeierstrassCurve<FieldElement>>,
                               EnrollmentRecord<BinaryCurve>,
                               EnrollmentRecord<EdwardsCurve<FieldElement>>,
                               EnrollmentRecord<WeierstrassCurve<ExtFieldElement>>>;

// Parses a record blob against the registry; sealed blobs are decrypted with
// the verifier key (error if absent). The result is validated.
inline AnyRecord load_record(const Registry& reg, std::span<const std::uint8_t> bytes,
                             const std::optional<Uint>& verifier_key = std::nullopt) {
    detail::BodyReader r(bytes);
    auto magic = r.take(4);
    if (!(magic[0] == 'E' && magic[1] == 'C' && magic[2] == 'R' && magic[3] == 'C'))
        throw WireError(WireCode::malformed_body, "not an enrollment record");
    if (r.u8() != 1) throw WireError(WireCode::malformed_body, "unsupported record version");
    const std::uint8_t flags = r.u8();
    if (flags > 1) throw WireError(WireCode::malformed_body, "unknown record flags");
    const bool sealed = flags == 1;
    std::string curve_name = r.str();
    std::string claimant = r.str();
    const std::size_t t = r.u8();
    const std::uint8_t kind = r.u8();
    const std::uint32_t k = r.u32();
    const std::uint32_t e = r.u32();

    const AnySystem& any = reg.get(curve_name);
    return std::visit(
        [&](const auto& sys) -> AnyRecord {
            using C = std::decay_t<decltype(sys.curve)>;
            EnrollmentRecord<C> rec;
            rec.claimant_id = claimant;
            rec.curve_name = curve_name;
            rec.t = t;
            rec.extractor = sys.extractor_params();
            // Records are bound to the registry's extraction profile; stale or
            // tampered parameters are refused rather than reinterpreted.
            if ((rec.extractor.kind == ExtractorKind::lk ? 0 : 1) != kind ||
                rec.extractor.k != k || rec.extractor.e != e)
                throw WireError(WireCode::malformed_body,
                                "record extractor parameters do not match the curve profile");
            if (!sealed) {
                rec.B = detail::take_point(r, sys.curve);
                rec.s = r.blob();
                rec.P = detail::take_point(r, sys.curve);
                rec.C_point = detail::take_point(r, sys.curve);
            } else {
                if (!verifier_key)
                    throw WireError(WireCode::malformed_body,
                                    "sealed record requires the verifier private key");
                EnrollmentCiphertext<C> ct;
                ct.c1 = detail::take_point(r, sys.curve);
                ct.c2 = detail::take_point(r, sys.curve);
                ct.sealed_s = r.blob();
                rec.P = detail::take_point(r, sys.curve);
                rec.C_point = detail::take_point(r, sys.curve);
                auto [B, s] = decrypt_enrollment(sys, ct, *verifier_key);
                rec.B = B;
                rec.s = std::move(s);
            }
            r.expect_done();
            validate_record(sys, rec);
            return rec;
        },
        any);
}

// ---------------------------------------------------------------------------
// Append-only enrollment store: a directory of files, each a sequence of
// u32-length-prefixed record blobs; the latest blob per claimant id wins.
// Reads are shared, appends exclusive.

class EnrollmentStore {
public:
    EnrollmentStore(const Registry& reg, std::optional<Uint> verifier_key = std::nullopt)
        : reg_(&reg), key_(std::move(verifier_key)) {}

    // Loads every *.rec file in the directory; other files are ignored.
    void load_directory(const std::filesystem::path& dir) {
        std::unique_lock lock(mu_);
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            if (entry.path().extension() != ".rec") continue;
            load_file_locked(entry.path());
        }
    }

    void load_file(const std::filesystem::path& file) {
        std::unique_lock lock(mu_);
        load_file_locked(file);
    }

    void add_blob(std::span<const std::uint8_t> blob) {
        AnyRecord rec = load_record(*reg_, blob, key_);
        std::string id = std::visit([](const auto& r) { return r.claimant_id; }, rec);
        std::unique_lock lock(mu_);
        records_.insert_or_assign(std::move(id), std::move(rec));
    }

    // Appends to the store file and registers the record.
    void append(const std::filesystem::path& file, std::span<const std::uint8_t> blob) {
        add_blob(blob);
        std::unique_lock lock(mu_);
        std::ofstream out(file, std::ios::binary | std::ios::app);
        if (!out) throw ConfigError("cannot open enrollment store for append: " + file.string());
        std::uint8_t len[4] = {static_cast<std::uint8_t>(blob.size() >> 24),
                               static_cast<std::uint8_t>(blob.size() >> 16),
                               static_cast<std::uint8_t>(blob.size() >> 8),
                               static_cast<std::uint8_t>(blob.size())};
        out.write(reinterpret_cast<const char*>(len), 4);
        out.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
    }

    std::optional<AnyRecord> find(const std::string& claimant_id) const {
        std::shared_lock lock(mu_);
        auto it = records_.find(claimant_id);
        if (it == records_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const {
        std::shared_lock lock(mu_);
        return records_.size();
    }

private:
    void load_file_locked(const std::filesystem::path& file) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw ConfigError("cannot open enrollment store: " + file.string());
        std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());
        // A bare record blob (as `enroll --out` writes) starts with the ECRC
        // magic; store append files are u32-length-prefixed sequences.
        if (data.size() >= 4 && data[0] == 'E' && data[1] == 'C' && data[2] == 'R' && data[3] == 'C') {
            AnyRecord rec = load_record(*reg_, data, key_);
            std::string id = std::visit([](const auto& r) { return r.claimant_id; }, rec);
            records_.insert_or_assign(std::move(id), std::move(rec));
            return;
        }
        std::size_t pos = 0;
        while (pos + 4 <= data.size()) {
            std::size_t len = (std::size_t(data[pos]) << 24) | (std::size_t(data[pos + 1]) << 16) |
                              (std::size_t(data[pos + 2]) << 8) | std::size_t(data[pos + 3]);
            pos += 4;
            if (pos + len > data.size())
                throw WireError(WireCode::truncated, "enrollment store file is truncated");
            AnyRecord rec = load_record(*reg_, std::span(data).subspan(pos, len), key_);
            std::string id = std::visit([](const auto& r) { return r.claimant_id; }, rec);
            records_.insert_or_assign(std::move(id), std::move(rec));
            pos += len;
        }
        if (pos != data.size())
            throw WireError(WireCode::truncated, "enrollment store file has trailing bytes");
    }

    const Registry* reg_;
    std::optional<Uint> key_;
    mutable std::shared_mutex mu_;
    std::map<std::string, AnyRecord> records_;
};

}  // namespace ecid
