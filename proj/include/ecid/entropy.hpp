#pragma once

// Entropy sources for protocol randomness. Two implementations: the OS
// generator for real use, and a seeded deterministic generator (SHA-256 in
// counter mode) so the exhaustive suites and the CLI test mode replay
// bit-for-bit. The ECID_SEED environment variable switches the CLI into
// seeded mode.

#include <cstdlib>
#include <memory>
#include <random>
#include <span>
#include <string>

#include "ecid/bigint.hpp"
#include "ecid/sha256.hpp"

namespace ecid {

class EntropySource {
public:
    virtual ~EntropySource() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;
};

class SystemEntropy final : public EntropySource {
public:
    void fill(std::span<std::uint8_t> out) override {
        for (auto& b : out) b = static_cast<std::uint8_t>(dev_());
    }

private:
    std::random_device dev_;
};

class SeededEntropy final : public EntropySource {
public:
    explicit SeededEntropy(std::span<const std::uint8_t> seed) : seed_(seed.begin(), seed.end()) {}
    explicit SeededEntropy(const std::string& seed)
        : seed_(seed.begin(), seed.end()) {}

    void fill(std::span<std::uint8_t> out) override {
        for (auto& b : out) {
            if (pos_ == block_.size()) refill();
            b = block_[pos_++];
        }
    }

private:
    void refill() {
        Sha256 h;
        h.update(std::span<const std::uint8_t>(seed_.data(), seed_.size()));
        std::uint8_t ctr[8];
        for (int i = 0; i < 8; ++i) ctr[i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
        h.update(ctr);
        auto d = h.finish();
        block_.assign(d.begin(), d.end());
        pos_ = 0;
        ++counter_;
    }

    std::vector<std::uint8_t> seed_;
    std::vector<std::uint8_t> block_;
    std::size_t pos_ = 0;
    std::uint64_t counter_ = 0;
};

// Honors ECID_SEED if set, otherwise OS entropy.
inline std::unique_ptr<EntropySource> make_default_entropy() {
    if (const char* seed = std::getenv("ECID_SEED"); seed && *seed)
        return std::make_unique<SeededEntropy>(std::string(seed));
    return std::make_unique<SystemEntropy>();
}

// Uniform integer in [0, bound) by rejection sampling on bit_length(bound-1) bits.
inline Uint uniform_below(EntropySource& rng, const Uint& bound) {
    if (bound.is_zero()) throw MathError("uniform_below with zero bound");
    const Uint top = bound.sub(Uint(1));
    if (top.is_zero()) return Uint();
    const std::size_t bits = top.bit_length();
    const std::size_t nbytes = (bits + 7) / 8;
    std::vector<std::uint8_t> buf(nbytes);
    for (;;) {
        rng.fill(buf);
        Uint v = Uint::from_bytes_be(buf).trunc(bits);
        if (v <= top) return v;
    }
}

// Uniform in [1, bound), the protocol's scalar domain.
inline Uint uniform_nonzero_below(EntropySource& rng, const Uint& bound) {
    if (bound <= Uint(1)) throw MathError("empty scalar range");
    return uniform_below(rng, bound.sub(Uint(1))).add(Uint(1));
}

}  // namespace ecid
