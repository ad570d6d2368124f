#pragma once

// Named curve parameter sets. The registry ships desk-scale toys (fully
// enumerable, used by the exhaustive suites) and production sets with
// published orders. Every set is validated on load: non-singularity, base
// point membership, base order primality, l*P = identity, and for Edwards
// sets the Elligator parameter derivation.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ecid/curves.hpp"
#include "ecid/extractors.hpp"
#include "ecid/maps.hpp"

namespace ecid {

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

// Per-curve protocol defaults; desk-scale sets do not hard-enforce the
// extractor lemma bound (it admits no k at toy sizes).
struct ProtocolProfile {
    std::size_t t = 3;  // challenge parameter: e uniform in {1, ..., 2^(t-1)}
    ExtractorKind extractor = ExtractorKind::lk;
    std::size_t k = 2;
    std::size_t e = 1;
    bool enforce_bounds = false;
};

template <class C>
struct CurveSystem {
    std::string name;
    C curve;
    typename C::Pt base;
    Uint group_order;  // N = #E(F_q)
    Uint base_order;   // l, prime
    std::optional<ElligatorParams> elligator;
    ProtocolProfile profile;

    ExtractorParams extractor_params() const {
        ExtractorParams p;
        p.kind = profile.extractor;
        p.k = profile.k;
        p.e = profile.e;
        p.order_bits = base_order.bit_length();
        if (p.kind == ExtractorKind::lk) {
            p.n = curve.field_size().bit_length();
        } else if constexpr (std::is_same_v<typename C::Element, ExtFieldElement>) {
            p.n = curve.a().basis->degree();
            p.m = curve.a().basis->p.bit_length();
        }
        return p;
    }
};

using PrimeSystem = CurveSystem<WeierstrassCurve<FieldElement>>;
using BinarySystem = CurveSystem<BinaryCurve>;
using EdwardsSystem = CurveSystem<EdwardsCurve<FieldElement>>;
using ExtSystem = CurveSystem<WeierstrassCurve<ExtFieldElement>>;

using AnySystem = std::variant<PrimeSystem, BinarySystem, EdwardsSystem, ExtSystem>;

namespace detail {
template <class C>
void validate_system(const CurveSystem<C>& sys) {
    sys.curve.validate();
    if (!sys.curve.on_curve(sys.base))
        throw ConfigError("curve set '" + sys.name + "': base point is not on the curve");
    if (sys.curve.is_identity(sys.base))
        throw ConfigError("curve set '" + sys.name + "': base point is the identity");
    if (!is_probable_prime(sys.base_order))
        throw ConfigError("curve set '" + sys.name + "': base point order must be prime");
    if (!sys.group_order.mod(sys.base_order).is_zero())
        throw ConfigError("curve set '" + sys.name + "': base order does not divide the group order");
    if (!sys.curve.is_identity(scalar_mul(sys.curve, sys.base_order, sys.base)))
        throw ConfigError("curve set '" + sys.name + "': l * base != identity");
    if constexpr (std::is_same_v<C, EdwardsCurve<FieldElement>>) {
        if (!sys.elligator)
            throw ConfigError("curve set '" + sys.name + "': Edwards sets need an Elligator seed");
        if (!(sys.elligator->d == sys.curve.d()))
            throw ConfigError("curve set '" + sys.name +
                              "': Elligator seed derives a different d than the curve's");
    }
    // Desk-scale sets must agree with the brute-force counting oracle.
    if (sys.curve.field_size() <= Uint(kNaiveCountLimit)) {
        if (naive_point_count(sys.curve) != sys.group_order)
            throw ConfigError("curve set '" + sys.name + "': declared order contradicts naive count");
    }
}
}  // namespace detail

class Registry {
public:
    void add(AnySystem sys) {
        std::visit([&](const auto& s) { detail::validate_system(s); }, sys);
        std::string name = std::visit([](const auto& s) { return s.name; }, sys);
        curves_.insert_or_assign(std::move(name), std::move(sys));
    }

    const AnySystem& get(const std::string& name) const {
        auto it = curves_.find(name);
        if (it == curves_.end()) throw ConfigError("unknown curve parameter set: " + name);
        return it->second;
    }

    bool contains(const std::string& name) const { return curves_.count(name) != 0; }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : curves_) out.push_back(k);
        return out;
    }

    // Deployment-wide protocol overrides (config file): applied to every set
    // so enrollment, serving and identification agree on t and k.
    void override_protocol(std::optional<std::size_t> t, std::optional<std::size_t> k) {
        for (auto& [name, sys] : curves_)
            std::visit(
                [&](auto& s) {
                    if (t) s.profile.t = *t;
                    if (k) s.profile.k = *k;
                },
                sys);
    }

    static Registry builtin();

private:
    std::map<std::string, AnySystem> curves_;
};

inline Registry Registry::builtin() {
    Registry reg;

    {  // toy17: y^2 = x^3 + 2x + 2 over F_17, 19 points, generated by (5, 1)
        const Uint p(17);
        PrimeSystem sys{"toy17",
                        WeierstrassCurve<FieldElement>(fp_make(Uint(2), p), fp_make(Uint(2), p)),
                        AffinePoint<FieldElement>::affine(fp_make(Uint(5), p), fp_make(Uint(1), p)),
                        Uint(19),
                        Uint(19),
                        std::nullopt,
                        {3, ExtractorKind::lk, 2, 1, false}};
        reg.add(std::move(sys));
    }
    {  // toy19ed: x^2 + y^2 = 1 + 10 x^2 y^2 over F_19 (Elligator seed s = 1), 20 points
        const Uint p(19);
        auto ep = elligator_setup(fp_make(Uint(1), p));
        EdwardsSystem sys{"toy19ed",
                          EdwardsCurve<FieldElement>(ep.d),
                          AffinePoint<FieldElement>::affine(fp_make(Uint(3), p), fp_make(Uint(10), p)),
                          Uint(20),
                          Uint(5),
                          ep,
                          {3, ExtractorKind::lk, 2, 1, false}};
        reg.add(std::move(sys));
    }
    {  // toy16b: y^2 + xy = x^3 + z^3 x^2 + (z^3+1) over F_16 = GF(2)[z]/(z^4+z+1), 22 points
        const Uint red(0b10011);
        BinarySystem sys{"toy16b",
                         BinaryCurve(gf2m_make(Uint(0b1000), red), gf2m_make(Uint(0b1001), red)),
                         AffinePoint<Gf2mElement>::affine(gf2m_make(Uint(0b1000), red),
                                                          gf2m_make(Uint(0b0001), red)),
                         Uint(22),
                         Uint(11),
                         std::nullopt,
                         {3, ExtractorKind::lk, 2, 1, false}};
        reg.add(std::move(sys));
    }
    {  // toy25w: y^2 = x^3 + 2x + 1 over F_25 = F_5[a]/(a^2+2), 35 points, order-7 base
        auto basis = make_ext_basis(Uint(5), {Uint(2), Uint(0)});
        auto el = [&](std::uint64_t c0, std::uint64_t c1) {
            return fpn_make({Uint(c0), Uint(c1)}, basis);
        };
        ExtSystem sys{"toy25w",
                      WeierstrassCurve<ExtFieldElement>(el(2, 0), el(1, 0)),
                      AffinePoint<ExtFieldElement>::affine(el(1, 0), el(2, 0)),
                      Uint(35),
                      Uint(7),
                      std::nullopt,
                      {3, ExtractorKind::dk, 1, 1, false}};
        reg.add(std::move(sys));
    }
    {  // toy125w: y^2 = x^3 + x + 2 over F_125 = F_5[a]/(a^3+a+1); 125 = 2 (mod 3), so
       // the Icart route works and the identification protocol runs over D_k
        auto basis = make_ext_basis(Uint(5), {Uint(1), Uint(1), Uint(0)});
        auto el = [&](std::uint64_t c0, std::uint64_t c1, std::uint64_t c2) {
            return fpn_make({Uint(c0), Uint(c1), Uint(c2)}, basis);
        };
        ExtSystem sys{"toy125w",
                      WeierstrassCurve<ExtFieldElement>(el(1, 0, 0), el(2, 0, 0)),
                      AffinePoint<ExtFieldElement>::affine(el(0, 0, 3), el(2, 0, 4)),
                      Uint(148),
                      Uint(37),
                      std::nullopt,
                      {3, ExtractorKind::dk, 2, 1, false}};
        reg.add(std::move(sys));
    }
    {  // curve1174: x^2 + y^2 = 1 - 1174 x^2 y^2 over p = 2^251 - 9; #E = 4l with
       // l = 2^249 - 11332719920821432534773113288178349711; cofactor-4 base point.
        const Uint p = Uint(1).shl(251).sub(Uint(9));
        const Uint l = Uint(1).shl(249).sub(Uint::from_dec("11332719920821432534773113288178349711"));
        auto ep = elligator_setup(fp_make(
            Uint::from_hex("277085b297cd1932b59aa70a16f6189baa29bd18b4fbf92c7cdb60e2e4bfbcf"), p));
        EdwardsSystem sys{
            "curve1174",
            EdwardsCurve<FieldElement>(ep.d),
            AffinePoint<FieldElement>::affine(
                fp_make(Uint::from_hex("7727e8e657302200d03130e4c4cba189a38eac04307b328eeeea57ec04ea1f6"), p),
                fp_make(Uint::from_hex("284673a97b9b09bb54ca6db550a9b0f81ab99920469fda975782d451021e2c5"), p)),
            Uint(4).mul(l),
            l,
            ep,
            {80, ExtractorKind::lk, 64, 80, true}};
        reg.add(std::move(sys));
    }
    {  // nistp384: y^2 = x^3 - 3x + b over the P-384 prime; p = 2 (mod 3), Icart-capable
        const Uint p = Uint::from_hex(
            "fffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffeffffffff0000000000000000ffffffff");
        const Uint n = Uint::from_hex(
            "ffffffffffffffffffffffffffffffffffffffffffffffffc7634d81f4372ddf581a0db248b0a77aecec196accc52973");
        PrimeSystem sys{
            "nistp384",
            WeierstrassCurve<FieldElement>(
                fp_make(p.sub(Uint(3)), p),
                fp_make(Uint::from_hex("b3312fa7e23ee7e4988e056be3f82d19181d9c6efe8141120314088f5013875a"
                                       "c656398d8a2ed19d2a85c8edd3ec2aef"),
                        p)),
            AffinePoint<FieldElement>::affine(
                fp_make(Uint::from_hex("aa87ca22be8b05378eb1c71ef320ad746e1d3b628ba79b9859f741e082542a38"
                                       "5502f25dbf55296c3a545e3872760ab7"),
                        p),
                fp_make(Uint::from_hex("3617de4a96262c6f5d9e98bf9292dc29f8f41dbd289a147ce9da3113b5f0b8c0"
                                       "0a60b1ce1d7e819d7a431d7c90ea0e5f"),
                        p)),
            n,
            n,
            std::nullopt,
            {80, ExtractorKind::lk, 128, 80, true}};
        reg.add(std::move(sys));
    }
    {  // secp160r1: exactly 160-bit prime field, published order; no supported
       // hash-to-point encoding (p = 1 mod 3, not Edwards), so Schnorr and raw
       // arithmetic only
        const Uint p = Uint::from_hex("ffffffffffffffffffffffffffffffff7fffffff");
        const Uint n = Uint::from_hex("0100000000000000000001f4c8f927aed3ca752257");
        PrimeSystem sys{
            "secp160r1",
            WeierstrassCurve<FieldElement>(
                fp_make(p.sub(Uint(3)), p),
                fp_make(Uint::from_hex("1c97befc54bd7a8b65acf89f81d4d4adc565fa45"), p)),
            AffinePoint<FieldElement>::affine(
                fp_make(Uint::from_hex("4a96b5688ef573284664698968c38bb913cbfc82"), p),
                fp_make(Uint::from_hex("23a628553168947d59dcc912042351377ac5fb32"), p)),
            n,
            n,
            std::nullopt,
            {80, ExtractorKind::lk, 32, 40, true}};
        reg.add(std::move(sys));
    }
    return reg;
}

}  // namespace ecid
