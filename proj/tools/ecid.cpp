// ecid: biometric-seeded elliptic-curve identification over a framed
// transport: keygen, enrollment, a verifier service, prover sessions, test
// vector generation and the exhaustive desk-scale selftest.
//
// Exit codes: 0 accept/ok, 1 reject, 2 protocol error, 3 config error.

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "ecid/registry_json.hpp"
#include "ecid/selftest.hpp"
#include "ecid/session.hpp"

using namespace ecid;

namespace {

struct CliConfig {
    std::string registry_path;
    std::optional<std::size_t> t_override;
    std::optional<std::size_t> k_override;
    int timeout_ms = 10000;
};

CliConfig load_config(const std::string& path) {
    CliConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    if (doc.contains("registry")) cfg.registry_path = doc["registry"].get<std::string>();
    if (doc.contains("t")) cfg.t_override = doc["t"].get<std::size_t>();
    if (doc.contains("k")) cfg.k_override = doc["k"].get<std::size_t>();
    if (doc.contains("timeout_ms")) cfg.timeout_ms = doc["timeout_ms"].get<int>();
    return cfg;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

// --- small tagged file formats for keys and prover secrets ------------------

std::vector<std::uint8_t> pack_tagged(const char* magic, const std::vector<std::string>& strs,
                                      std::span<const std::uint8_t> payload) {
    std::vector<std::uint8_t> out(magic, magic + 4);
    out.push_back(1);
    for (const auto& s : strs) detail::put_str(out, s);
    detail::put_blob(out, payload);
    return out;
}

struct Tagged {
    std::vector<std::string> strs;
    std::vector<std::uint8_t> payload;
};

Tagged unpack_tagged(const char* magic, std::size_t nstrs, std::span<const std::uint8_t> bytes) {
    detail::BodyReader r(bytes);
    auto m = r.take(4);
    if (!std::equal(m.begin(), m.end(), magic))
        throw ConfigError(std::string("bad file magic, expected ") + magic);
    if (r.u8() != 1) throw ConfigError("unsupported file version");
    Tagged t;
    for (std::size_t i = 0; i < nstrs; ++i) t.strs.push_back(r.str());
    t.payload = r.blob();
    r.expect_done();
    return t;
}

// --- helpers over the type-erased registry ----------------------------------

Registry make_registry(const CliConfig& cfg, const std::string& registry_flag) {
    Registry reg = Registry::builtin();
    if (!cfg.registry_path.empty()) load_registry_file(reg, cfg.registry_path);
    if (!registry_flag.empty()) load_registry_file(reg, registry_flag);
    reg.override_protocol(cfg.t_override, cfg.k_override);
    return reg;
}

int run_keygen(const Registry& reg, const std::string& curve, const std::string& out_prefix) {
    auto rng = make_default_entropy();
    return std::visit(
        [&](const auto& sys) {
            auto kp = elgamal_keygen(sys, *rng);
            auto pub = encode_point(sys.curve, kp.pub);
            write_file(out_prefix + ".pub", pack_tagged("ECPK", {sys.name}, pub));
            auto sk = kp.secret.to_bytes_be(scalar_width(sys.base_order));
            write_file(out_prefix + ".key", pack_tagged("ECVK", {sys.name}, sk));
            std::cout << "wrote " << out_prefix << ".pub and " << out_prefix << ".key for curve "
                      << sys.name << "\n";
            return 0;
        },
        reg.get(curve));
}

int run_enroll(const Registry& reg, const CliConfig& cfg, const std::string& curve,
               const std::string& biometric_path, std::string claimant,
               const std::string& verifier_pub_path, const std::string& out_path,
               std::string secret_out, std::string prover_out, const std::string& push_addr,
               bool plaintext) {
    (void)cfg;
    auto rng = make_default_entropy();
    auto bio_bytes = read_file(biometric_path);
    auto bio = make_biometric(bio_bytes);
    if (claimant.empty())
        claimant = std::filesystem::path(biometric_path).stem().string();
    if (secret_out.empty()) secret_out = out_path + ".secret";
    if (prover_out.empty()) prover_out = out_path + ".prover";

    return std::visit(
        [&](const auto& sys) {
            auto [rec, secret] = enroll(bio, sys, claimant, *rng);
            auto plain_blob = serialize_record(sys, rec);

            std::vector<std::uint8_t> out_blob;
            if (!verifier_pub_path.empty() && !plaintext) {
                auto tagged = unpack_tagged("ECPK", 1, read_file(verifier_pub_path));
                if (tagged.strs[0] != sys.name)
                    throw ConfigError("verifier key is for curve " + tagged.strs[0] + ", not " +
                                      sys.name);
                auto pub = decode_point(sys.curve, tagged.payload);
                SealedRecord<std::decay_t<decltype(sys.curve)>> srec;
                srec.claimant_id = rec.claimant_id;
                srec.curve_name = rec.curve_name;
                srec.ct = encrypt_point_for_enrollment(sys, rec.B, rec.s, pub, *rng);
                srec.P = rec.P;
                srec.C_point = rec.C_point;
                srec.t = rec.t;
                srec.extractor = rec.extractor;
                out_blob = serialize_sealed_record(sys, srec);
            } else {
                std::cerr << "warning: plaintext trusted-channel enrollment (insecure); "
                             "pass --verifier-pub to seal (B, s)\n";
                out_blob = plain_blob;
            }
            write_file(out_path, out_blob);
            write_file(prover_out, plain_blob);

            auto alpha = secret.alpha.to_bytes_be(scalar_width(sys.base_order));
            write_file(secret_out, pack_tagged("ECSK", {sys.name, claimant}, alpha));
            std::cout << "enrolled '" << claimant << "' on " << sys.name << "\n"
                      << "  verifier record: " << out_path << "\n"
                      << "  prover record:   " << prover_out << "\n"
                      << "  prover secret:   " << secret_out << "\n";

            if (!push_addr.empty()) {
                auto [host, port] = parse_address(push_addr);
                auto stream = TcpStream::connect(host, port, cfg.timeout_ms);
                WireMessage msg{MsgKind::enroll, {}, out_blob};
                rng->fill(msg.session_id);
                stream.send_bytes(frame(msg));
                auto reply = deframe(stream);
                if (reply.kind != MsgKind::result || reply.body.empty() || reply.body[0] != 1)
                    throw ProtoError("verifier did not accept the pushed record");
                std::cout << "  pushed to " << push_addr << "\n";
            }
            return 0;
        },
        reg.get(curve));
}

std::atomic<bool> g_stop{false};

int run_serve(const Registry& reg, const CliConfig& cfg, const std::string& records_dir,
              const std::string& listen_addr, const std::string& key_path) {
    std::optional<Uint> key;
    if (!key_path.empty()) {
        auto tagged = unpack_tagged("ECVK", 1, read_file(key_path));
        key = Uint::from_bytes_be(tagged.payload);
    }
    EnrollmentStore store(reg, key);
    std::filesystem::create_directories(records_dir);
    store.load_directory(records_dir);

    auto [host, port] = parse_address(listen_addr);
    TcpListener listener(host, port);
    std::cout << "listening on " << host << ":" << listener.bound_port() << " with " << store.size()
              << " records\n"
              << std::flush;

    std::filesystem::path sink = std::filesystem::path(records_dir) / "received.rec";
    while (!g_stop.load()) {
        TcpStream conn = listener.accept();
        std::thread([&reg, &store, sink, timeout = cfg.timeout_ms,
                     stream = std::move(conn)]() mutable {
            stream.set_timeout_ms(timeout);
            auto rng = make_default_entropy();
            try {
                auto result = run_identification_verifier(stream, store, reg, *rng, sink);
                std::cout << "session: claimant='" << result.claimant_id << "' verdict="
                          << (result.verdict == Verdict::accepted   ? "accept"
                              : result.verdict == Verdict::rejected ? "reject"
                                                                    : "protocol-error")
                          << " (" << result.detail << ")\n"
                          << std::flush;
            } catch (const Error& e) {
                std::cout << "session error: " << e.what() << "\n" << std::flush;
            }
        }).detach();
    }
    return 0;
}

int run_identify(const Registry& reg, const CliConfig& cfg, const std::string& record_path,
                 const std::string& secret_path, const std::string& connect_addr) {
    auto rec = load_record(reg, read_file(record_path));
    auto tagged = unpack_tagged("ECSK", 2, read_file(secret_path));
    ProverSecret secret{Uint::from_bytes_be(tagged.payload)};

    std::string rec_curve = std::visit([](const auto& r) { return r.curve_name; }, rec);
    if (tagged.strs[0] != rec_curve)
        throw ConfigError("secret file is for curve " + tagged.strs[0] + ", record is " + rec_curve);

    auto [host, port] = parse_address(connect_addr);
    auto stream = TcpStream::connect(host, port, cfg.timeout_ms);
    auto rng = make_default_entropy();
    auto result = run_identification_prover(stream, reg, rec, secret, *rng);
    std::cout << (result.verdict == Verdict::accepted   ? "accepted"
                  : result.verdict == Verdict::rejected ? "rejected"
                                                        : "protocol error")
              << ": " << result.detail << "\n";
    return result.exit_code();
}

int run_gen_vectors(const Registry& reg, const std::string& out_path) {
    nlohmann::json doc;
    doc["vectors"] = nlohmann::json::array();
    const std::vector<std::string> inputs = {"fingerprint+retina: alice", "fingerprint+retina: bob",
                                             "voice: carol", "fixture-0001", "fixture-0002"};
    for (const std::string name : {"toy17", "toy19ed", "toy125w", "curve1174", "nistp384"}) {
        std::visit(
            [&](const auto& sys) {
                for (const auto& input : inputs) {
                    auto bio = make_biometric(
                        std::span(reinterpret_cast<const std::uint8_t*>(input.data()), input.size()));
                    auto P = hash_biometric(sys, bio);
                    auto enc = encode_point(sys.curve, P);
                    std::string hex;
                    static const char* digits = "0123456789abcdef";
                    for (auto b : enc) {
                        hex.push_back(digits[b >> 4]);
                        hex.push_back(digits[b & 0xF]);
                    }
                    doc["vectors"].push_back(
                        {{"curve", sys.name}, {"input", input}, {"point", hex}});
                }
            },
            reg.get(name));
    }
    std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_file(out_path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
        std::cout << "wrote " << doc["vectors"].size() << " vectors to " << out_path << "\n";
    }
    return 0;
}

int run_selftest(const Registry& reg) {
    auto results = selftest::run_desk_checks(reg);
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << " - " << r.name;
        if (!r.detail.empty()) std::cout << " [" << r.detail << "]";
        std::cout << "\n";
        all = all && r.pass;
    }
    std::cout << (all ? "selftest: all checks passed\n" : "selftest: FAILURES present\n");
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ecid: biometric-seeded elliptic-curve identification"};
    app.require_subcommand(1);

    std::string config_path, registry_flag;
    app.add_option("--config", config_path, "JSON config file (registry path, t, k, timeout_ms)");
    app.add_option("--registry", registry_flag, "extra curve registry file (JSON)");

    std::string curve = "curve1174", out_prefix = "verifier";
    auto* keygen = app.add_subcommand("keygen", "generate a verifier ElGamal keypair");
    keygen->add_option("--curve", curve, "curve parameter set")->capture_default_str();
    keygen->add_option("--out", out_prefix, "output file prefix")->capture_default_str();

    std::string biometric_path, claimant, verifier_pub, record_out = "enrollment.rec";
    std::string secret_out, prover_out, push_addr;
    bool plaintext = false;
    auto* enroll_cmd = app.add_subcommand("enroll", "enroll a claimant from a biometric file");
    enroll_cmd->add_option("--curve", curve, "curve parameter set")->capture_default_str();
    enroll_cmd->add_option("--biometric", biometric_path, "biometric bit-string file")->required();
    enroll_cmd->add_option("--id", claimant, "claimant id (default: biometric file stem)");
    enroll_cmd->add_option("--verifier-pub", verifier_pub, "verifier public key (seals B and s)");
    enroll_cmd->add_option("--out", record_out, "verifier-side record file")->capture_default_str();
    enroll_cmd->add_option("--secret-out", secret_out, "prover secret file (default: OUT.secret)");
    enroll_cmd->add_option("--prover-out", prover_out, "prover record file (default: OUT.prover)");
    enroll_cmd->add_option("--push", push_addr, "push the record to a running verifier (host:port)");
    enroll_cmd->add_flag("--plaintext", plaintext, "trusted-channel mode: do not seal (insecure)");

    std::string records_dir = "records", listen_addr = "127.0.0.1:7700", key_path;
    auto* serve = app.add_subcommand("serve", "run the verifier service");
    serve->add_option("--records", records_dir, "enrollment record directory")->capture_default_str();
    serve->add_option("--listen", listen_addr, "listen address (host:port; port 0 = ephemeral)")
        ->capture_default_str();
    serve->add_option("--key", key_path, "verifier private key (unseals records)");

    std::string record_path, secret_path, connect_addr = "127.0.0.1:7700";
    auto* identify = app.add_subcommand("identify", "run one identification session as the prover");
    identify->add_option("--record", record_path, "prover record file")->required();
    identify->add_option("--secret", secret_path, "prover secret file")->required();
    identify->add_option("--connect", connect_addr, "verifier address")->capture_default_str();

    std::string vectors_out;
    auto* gen = app.add_subcommand("gen-vectors", "emit hash-to-point fixture vectors (JSON)");
    gen->add_option("--out", vectors_out, "output file (default: stdout)");

    app.add_subcommand("selftest", "run the exhaustive desk-scale verification suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        CliConfig cfg = load_config(config_path);
        Registry reg = make_registry(cfg, registry_flag);
        if (app.got_subcommand("keygen")) return run_keygen(reg, curve, out_prefix);
        if (app.got_subcommand("enroll"))
            return run_enroll(reg, cfg, curve, biometric_path, claimant, verifier_pub, record_out,
                              secret_out, prover_out, push_addr, plaintext);
        if (app.got_subcommand("serve")) return run_serve(reg, cfg, records_dir, listen_addr, key_path);
        if (app.got_subcommand("identify"))
            return run_identify(reg, cfg, record_path, secret_path, connect_addr);
        if (app.got_subcommand("gen-vectors")) return run_gen_vectors(reg, vectors_out);
        if (app.got_subcommand("selftest")) return run_selftest(reg);
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
