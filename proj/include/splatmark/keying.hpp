// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// Key-derivation layer: every random-looking object in the pipeline (payload
// bits, carrier permutation, spreading codes, detector subset, challenge
// viewpoints) is a pure function of the three secret keys and the claim
// string, reproduced bit-exactly from an HMAC-SHA256 keystream.

#ifndef SPLATMARK_KEYING_HPP
#define SPLATMARK_KEYING_HPP

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "splatmark/error.hpp"

namespace splatmark {

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(const std::string& s) {
    return Bytes(s.begin(), s.end());
}

/// One 32-byte secret. Equality is constant-time.
struct SecretKey {
    std::array<std::uint8_t, 32> data{};

    bool operator==(const SecretKey& other) const {
        unsigned diff = 0;
        for (std::size_t i = 0; i < data.size(); ++i) diff |= data[i] ^ other.data[i];
        return diff == 0;
    }
    bool operator!=(const SecretKey& other) const { return !(*this == other); }
};

/// The three secrets: carrier organization, claim binding, spreading.
struct KeySet {
    SecretKey k_sel;
    SecretKey k_code;
    SecretKey k_seq;

    bool operator==(const KeySet& other) const {
        // Bitwise & so all three constant-time comparisons always run.
        return (k_sel == other.k_sel) & (k_code == other.k_code) & (k_seq == other.k_seq);
    }
    bool operator!=(const KeySet& other) const { return !(*this == other); }
};

/// Owner/recipient identifier bound into every derivation. Must be non-empty.
struct Claim {
    std::string text;

    explicit Claim(std::string t) : text(std::move(t)) {
        if (text.empty()) throw DataError("claim must be non-empty");
    }
};

/// Bipolar payload: B entries in {-1, +1}.
struct Payload {
    std::vector<int> bits;
};

// --- hex / key file plumbing -------------------------------------------------

inline std::string to_hex(const std::uint8_t* data, std::size_t n) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(digits[data[i] >> 4]);
        out.push_back(digits[data[i] & 0xf]);
    }
    return out;
}

inline std::string to_hex(const SecretKey& k) { return to_hex(k.data.data(), k.data.size()); }

inline SecretKey key_from_hex(const std::string& hex) {
    if (hex.size() != 64)
        throw SchemaError("key must be 64 hex characters, got " + std::to_string(hex.size()));
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw SchemaError(std::string("invalid hex character '") + c + "' in key");
    };
    SecretKey k;
    for (std::size_t i = 0; i < 32; ++i)
        k.data[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return k;
}

inline nlohmann::json keyset_to_json(const KeySet& keys) {
    return {{"k_sel", to_hex(keys.k_sel)},
            {"k_code", to_hex(keys.k_code)},
            {"k_seq", to_hex(keys.k_seq)}};
}

inline KeySet keyset_from_json(const nlohmann::json& j) {
    for (const char* field : {"k_sel", "k_code", "k_seq"})
        if (!j.contains(field))
            throw SchemaError(std::string("keyset JSON missing field '") + field + "'");
    KeySet keys;
    keys.k_sel = key_from_hex(j.at("k_sel").get<std::string>());
    keys.k_code = key_from_hex(j.at("k_code").get<std::string>());
    keys.k_seq = key_from_hex(j.at("k_seq").get<std::string>());
    return keys;
}

inline KeySet load_keyset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open keyset file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("keyset file " + path + ": " + e.what());
    }
    return keyset_from_json(j);
}

inline void save_keyset(const KeySet& keys, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write keyset file: " + path);
    out << keyset_to_json(keys).dump(2) << '\n';
}

/// Fresh random keyset, seeded from std::random_device.
inline KeySet generate_keyset() {
    std::random_device rd;
    KeySet keys;
    for (SecretKey* k : {&keys.k_sel, &keys.k_code, &keys.k_seq})
        for (std::size_t i = 0; i < 32; i += 4) {
            const std::uint32_t w = rd();
            std::memcpy(k->data.data() + i, &w, 4);
        }
    return keys;
}

/// Reproducible keyset expanded from a 64-bit seed. Intended for tests and
/// benchmark manifests, not for protecting real assets.
inline KeySet generate_keyset(std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    KeySet keys;
    for (SecretKey* k : {&keys.k_sel, &keys.k_code, &keys.k_seq})
        for (std::size_t i = 0; i < 32; i += 8) {
            const std::uint64_t w = engine();
            std::memcpy(k->data.data() + i, &w, 8);
        }
    return keys;
}

// --- PRF core -----------------------------------------------------------------

inline Bytes hmac_sha256(const SecretKey& key, const Bytes& msg) {
    Bytes digest(32);
    unsigned int len = 0;
    if (!HMAC(EVP_sha256(), key.data.data(), static_cast<int>(key.data.size()),
              msg.data(), msg.size(), digest.data(), &len) ||
        len != 32)
        throw DataError("HMAC-SHA256 evaluation failed");
    return digest;
}

inline void append_u32be(Bytes& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

/// Domain-separated PRF context: each component is length-prefixed so
/// distinct (primary, tag, index) triples can never collide byte-wise.
inline Bytes make_context(const Bytes& primary, const std::string& tag) {
    Bytes ctx;
    append_u32be(ctx, static_cast<std::uint32_t>(primary.size()));
    ctx.insert(ctx.end(), primary.begin(), primary.end());
    append_u32be(ctx, static_cast<std::uint32_t>(tag.size()));
    ctx.insert(ctx.end(), tag.begin(), tag.end());
    return ctx;
}

inline Bytes make_context(const Bytes& primary, const std::string& tag, std::uint32_t index) {
    Bytes ctx = make_context(primary, tag);
    append_u32be(ctx, index);
    return ctx;
}

/// MSB-first bit stream over HMAC-SHA256(key, context || u32be(counter)),
/// counter = 0,1,2,... Blocks are produced lazily.
class PrfBitStream {
public:
    PrfBitStream(const SecretKey& key, Bytes context)
        : key_(key), context_(std::move(context)) {}

    int next_bit() {
        const std::size_t byte_index = bit_pos_ / 8;
        while (byte_index >= buffer_.size()) refill();
        const int bit = (buffer_[byte_index] >> (7 - bit_pos_ % 8)) & 1;
        ++bit_pos_;
        return bit;
    }

    /// Next `n` bits as a big-endian integer (n <= 63).
    std::uint64_t next_bits(int n) {
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v = (v << 1) | static_cast<std::uint64_t>(next_bit());
        return v;
    }

private:
    void refill() {
        Bytes msg = context_;
        append_u32be(msg, counter_++);
        const Bytes block = hmac_sha256(key_, msg);
        buffer_.insert(buffer_.end(), block.begin(), block.end());
    }

    SecretKey key_;
    Bytes context_;
    Bytes buffer_;
    std::uint32_t counter_ = 0;
    std::size_t bit_pos_ = 0;
};

/// First `nbits` of the keystream as 0/1 values.
inline std::vector<int> prf_bits(const SecretKey& key, const Bytes& context, std::size_t nbits) {
    PrfBitStream stream(key, context);
    std::vector<int> bits(nbits);
    for (auto& b : bits) b = stream.next_bit();
    return bits;
}

// --- derivations ---------------------------------------------------------------

/// b(claim) = 2 * PRF(k_code, claim | "code")_{1:B} - 1.
inline Payload derive_payload(const KeySet& keys, const Claim& claim, std::size_t B) {
    if (B < 1) throw ConfigError("payload length B must be >= 1");
    const auto bits = prf_bits(keys.k_code, make_context(to_bytes(claim.text), "code"), B);
    Payload p;
    p.bits.reserve(B);
    for (int b : bits) p.bits.push_back(2 * b - 1);
    return p;
}

/// Keyed Fisher-Yates permutation of {0..T-1} driven by PRF(k_sel, claim | "perm").
/// Bounded draws take bit_width(i) bits and reject values > i (unbiased).
inline std::vector<std::uint32_t> derive_permutation(const KeySet& keys, const Claim& claim,
                                                     std::size_t T) {
    std::vector<std::uint32_t> perm(T);
    std::iota(perm.begin(), perm.end(), 0u);
    if (T < 2) return perm;
    PrfBitStream stream(keys.k_sel, make_context(to_bytes(claim.text), "perm"));
    for (std::size_t i = T - 1; i >= 1; --i) {
        const int nbits = std::bit_width(i);
        std::uint64_t v;
        do {
            v = stream.next_bits(nbits);
        } while (v > i);
        std::swap(perm[i], perm[v]);
    }
    return perm;
}

/// s_j(claim) = 2 * PRF(k_seq, claim | "seq" | j)_{1:T} - 1, bit index j 1-based.
inline std::vector<int> derive_spreading_code(const KeySet& keys, const Claim& claim,
                                              std::uint32_t bit_index, std::size_t T) {
    if (bit_index < 1) throw ConfigError("spreading-code bit index is 1-based");
    const auto bits =
        prf_bits(keys.k_seq, make_context(to_bytes(claim.text), "seq", bit_index), T);
    std::vector<int> code(T);
    for (std::size_t t = 0; t < T; ++t) code[t] = 2 * bits[t] - 1;
    return code;
}

/// Computes ceil(rho * T), snapping near-integer products so that decimal
/// budgets like 0.25 * 16 do not round up through FP noise.
inline std::size_t budget_count(double rho, std::size_t T) {
    const double x = rho * static_cast<double>(T);
    const double r = std::round(x);
    const double snapped = (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) ? r : x;
    return static_cast<std::size_t>(std::ceil(snapped));
}

/// Detector-side carrier budget: the first ceil(rho*T) entries of the keyed
/// permutation, read as carrier-slot indices.
inline std::vector<std::uint32_t> derive_detector_subset(const KeySet& keys, const Claim& claim,
                                                         std::size_t T, double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("detector budget rho must be in (0, 1]");
    const std::size_t count = budget_count(rho, T);
    if (count < 1) throw ConfigError("detector budget selects no carriers");
    auto perm = derive_permutation(keys, claim, T);
    perm.resize(std::min<std::size_t>(count, T));
    return perm;
}

} // namespace splatmark

#endif // SPLATMARK_KEYING_HPP
