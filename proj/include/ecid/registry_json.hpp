#pragma once

// Declarative curve registry files (JSON). External files add to or override
// the builtin parameter sets. The supersingular binary form is recognized by
// name and explicitly rejected: the group law for it is not implemented.

#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "ecid/registry.hpp"

namespace ecid {

namespace detail {

inline Uint json_uint(const nlohmann::json& v, const char* what) {
    if (v.is_string()) return Uint::from_string(v.get<std::string>());
    if (v.is_number_unsigned()) return Uint(v.get<std::uint64_t>());
    throw ConfigError(std::string("registry field '") + what + "' must be a string or unsigned integer");
}

inline std::vector<Uint> json_uint_vec(const nlohmann::json& v, const char* what) {
    if (!v.is_array()) throw ConfigError(std::string("registry field '") + what + "' must be an array");
    std::vector<Uint> out;
    for (const auto& e : v) out.push_back(json_uint(e, what));
    return out;
}

inline ProtocolProfile json_profile(const nlohmann::json& c) {
    ProtocolProfile p;
    if (!c.contains("protocol")) return p;
    const auto& j = c["protocol"];
    if (j.contains("t")) p.t = j["t"].get<std::size_t>();
    if (j.contains("extractor")) {
        std::string kind = j["extractor"].get<std::string>();
        if (kind == "lk") p.extractor = ExtractorKind::lk;
        else if (kind == "dk") p.extractor = ExtractorKind::dk;
        else throw ConfigError("unknown extractor kind: " + kind);
    }
    if (j.contains("k")) p.k = j["k"].get<std::size_t>();
    if (j.contains("e")) p.e = j["e"].get<std::size_t>();
    if (j.contains("enforce_bounds")) p.enforce_bounds = j["enforce_bounds"].get<bool>();
    return p;
}

}  // namespace detail

inline void load_registry_json(Registry& reg, const nlohmann::json& doc) {
    if (!doc.contains("curves") || !doc["curves"].is_array())
        throw ConfigError("registry file needs a top-level 'curves' array");
    for (const auto& c : doc["curves"]) {
        const std::string name = c.at("name").get<std::string>();
        const std::string model = c.at("model").get<std::string>();
        ProtocolProfile profile = detail::json_profile(c);

        if (model == "weierstrass_binary_supersingular")
            throw ConfigError("unsupported model for '" + name +
                              "': supersingular binary curves have no group law here");

        if (model == "weierstrass_prime") {
            const Uint p = detail::json_uint(c.at("p"), "p");
            PrimeSystem sys{name,
                            WeierstrassCurve<FieldElement>(
                                fp_make(detail::json_uint(c.at("a"), "a"), p),
                                fp_make(detail::json_uint(c.at("b"), "b"), p)),
                            AffinePoint<FieldElement>::affine(
                                fp_make(detail::json_uint(c.at("base").at(0), "base"), p),
                                fp_make(detail::json_uint(c.at("base").at(1), "base"), p)),
                            detail::json_uint(c.at("order"), "order"),
                            detail::json_uint(c.at("base_order"), "base_order"),
                            std::nullopt,
                            profile};
            reg.add(std::move(sys));
        } else if (model == "weierstrass_binary") {
            const Uint red = detail::json_uint(c.at("reduction"), "reduction");
            BinarySystem sys{name,
                             BinaryCurve(gf2m_make(detail::json_uint(c.at("a"), "a"), red),
                                         gf2m_make(detail::json_uint(c.at("b"), "b"), red)),
                             AffinePoint<Gf2mElement>::affine(
                                 gf2m_make(detail::json_uint(c.at("base").at(0), "base"), red),
                                 gf2m_make(detail::json_uint(c.at("base").at(1), "base"), red)),
                             detail::json_uint(c.at("order"), "order"),
                             detail::json_uint(c.at("base_order"), "base_order"),
                             std::nullopt,
                             profile};
            reg.add(std::move(sys));
        } else if (model == "edwards") {
            const Uint p = detail::json_uint(c.at("p"), "p");
            auto ep = elligator_setup(fp_make(detail::json_uint(c.at("elligator_s"), "elligator_s"), p));
            if (c.contains("d") && !(detail::json_uint(c.at("d"), "d").mod(p) == ep.d.value))
                throw ConfigError("curve '" + name + "': declared d does not match the Elligator seed");
            EdwardsSystem sys{name,
                              EdwardsCurve<FieldElement>(ep.d),
                              AffinePoint<FieldElement>::affine(
                                  fp_make(detail::json_uint(c.at("base").at(0), "base"), p),
                                  fp_make(detail::json_uint(c.at("base").at(1), "base"), p)),
                              detail::json_uint(c.at("order"), "order"),
                              detail::json_uint(c.at("base_order"), "base_order"),
                              ep,
                              profile};
            reg.add(std::move(sys));
        } else if (model == "weierstrass_ext") {
            const Uint p = detail::json_uint(c.at("p"), "p");
            auto basis = make_ext_basis(p, detail::json_uint_vec(c.at("defining"), "defining"));
            auto el = [&](const nlohmann::json& v, const char* what) {
                return fpn_make(detail::json_uint_vec(v, what), basis);
            };
            ExtSystem sys{name,
                          WeierstrassCurve<ExtFieldElement>(el(c.at("a"), "a"), el(c.at("b"), "b")),
                          AffinePoint<ExtFieldElement>::affine(el(c.at("base").at(0), "base"),
                                                               el(c.at("base").at(1), "base")),
                          detail::json_uint(c.at("order"), "order"),
                          detail::json_uint(c.at("base_order"), "base_order"),
                          std::nullopt,
                          profile};
            reg.add(std::move(sys));
        } else {
            throw ConfigError("unknown curve model: " + model);
        }
    }
}

inline void load_registry_file(Registry& reg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open registry file: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("registry file parse error: " + std::string(e.what()));
    }
    load_registry_json(reg, doc);
}

}  // namespace ecid
