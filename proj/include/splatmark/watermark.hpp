// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// Embedding: superposes the keyed spread-spectrum payload onto the mid-band
// DCT carriers of the flattened SH vector. Geometry and opacity fields pass
// through bit-identical; only SH coefficients change.

#ifndef SPLATMARK_WATERMARK_HPP
#define SPLATMARK_WATERMARK_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "splatmark/error.hpp"
#include "splatmark/gs_model.hpp"
#include "splatmark/keying.hpp"
#include "splatmark/transform.hpp"

namespace splatmark {

/// How per-bit amplitude responds to payload size.
///   FIXED_PER_BIT: alpha_j = alpha for every bit; total energy grows with B.
///   FIXED_TOTAL:   alpha_j = alpha * sqrt(reference_bits / B); total energy
///                  is held at the reference_bits level as B varies.
enum class EnergyProtocol { FIXED_PER_BIT, FIXED_TOTAL };

inline std::string to_string(EnergyProtocol p) {
    return p == EnergyProtocol::FIXED_PER_BIT ? "FIXED_PER_BIT" : "FIXED_TOTAL";
}

inline EnergyProtocol protocol_from_string(const std::string& s) {
    if (s == "FIXED_PER_BIT") return EnergyProtocol::FIXED_PER_BIT;
    if (s == "FIXED_TOTAL") return EnergyProtocol::FIXED_TOTAL;
    throw ConfigError("unknown energy protocol '" + s +
                      "' (expected FIXED_PER_BIT or FIXED_TOTAL)");
}

struct EmbedConfig {
    std::size_t bit_count = 32;
    double alpha = 0.01;
    EnergyProtocol protocol = EnergyProtocol::FIXED_PER_BIT;
    Band band{};
    std::size_t capacity_floor = 64;  // require T >= capacity_floor * bit_count
    std::size_t reference_bits = 32;  // FIXED_TOTAL energy reference
};

inline void validate_embed_config(const EmbedConfig& cfg) {
    if (cfg.bit_count < 1) throw ConfigError("bit count must be at least 1");
    if (!(cfg.alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (cfg.reference_bits < 1) throw ConfigError("reference bit count must be at least 1");
    validate_band(cfg.band);
}

/// Everything the detector needs to reproduce an embedding, minus the keys.
/// Safe to store next to the watermarked asset.
struct EmbedRecord {
    std::string claim;
    std::size_t bit_count = 0;
    double alpha = 0.0;
    EnergyProtocol protocol = EnergyProtocol::FIXED_PER_BIT;
    Band band{};
    std::size_t reference_bits = 32;
    std::size_t spectrum_length = 0; // L
    std::size_t carrier_count = 0;   // T
    std::size_t gaussian_count = 0;
    int sh_degree = 0;
};

inline nlohmann::json embed_record_to_json(const EmbedRecord& r) {
    return nlohmann::json{{"schema", "splatmark/embed-record/v1"},
                          {"claim", r.claim},
                          {"bit_count", r.bit_count},
                          {"alpha", r.alpha},
                          {"protocol", to_string(r.protocol)},
                          {"band", {{"lo", r.band.lo}, {"hi", r.band.hi}}},
                          {"reference_bits", r.reference_bits},
                          {"spectrum_length", r.spectrum_length},
                          {"carrier_count", r.carrier_count},
                          {"gaussian_count", r.gaussian_count},
                          {"sh_degree", r.sh_degree}};
}

inline EmbedRecord embed_record_from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "splatmark/embed-record/v1")
        throw SchemaError("unrecognized embed record schema '" + j.value("schema", "") + "'");
    EmbedRecord r;
    r.claim = j.at("claim").get<std::string>();
    r.bit_count = j.at("bit_count").get<std::size_t>();
    r.alpha = j.at("alpha").get<double>();
    r.protocol = protocol_from_string(j.at("protocol").get<std::string>());
    r.band.lo = j.at("band").at("lo").get<double>();
    r.band.hi = j.at("band").at("hi").get<double>();
    r.reference_bits = j.at("reference_bits").get<std::size_t>();
    r.spectrum_length = j.at("spectrum_length").get<std::size_t>();
    r.carrier_count = j.at("carrier_count").get<std::size_t>();
    r.gaussian_count = j.at("gaussian_count").get<std::size_t>();
    r.sh_degree = j.at("sh_degree").get<int>();
    return r;
}

inline EmbedConfig embed_config_from_record(const EmbedRecord& r) {
    EmbedConfig cfg;
    cfg.bit_count = r.bit_count;
    cfg.alpha = r.alpha;
    cfg.protocol = r.protocol;
    cfg.band = r.band;
    cfg.reference_bits = r.reference_bits;
    return cfg;
}

/// Per-bit amplitudes alpha_j under the configured energy protocol.
inline std::vector<double> compute_amplitudes(const EmbedConfig& cfg) {
    validate_embed_config(cfg);
    double a = cfg.alpha;
    if (cfg.protocol == EnergyProtocol::FIXED_TOTAL)
        a = cfg.alpha * std::sqrt(static_cast<double>(cfg.reference_bits) /
                                  static_cast<double>(cfg.bit_count));
    return std::vector<double>(cfg.bit_count, a);
}

/// delta[t] = sum_j amplitudes[j] * payload_j * code_j[t]: the code-division
/// superposition of all bits over the T carrier slots.
inline std::vector<double> superpose_payload(const std::vector<double>& amplitudes,
                                             const Payload& payload,
                                             const std::vector<std::vector<int>>& codes) {
    const std::size_t B = payload.bits.size();
    if (amplitudes.size() != B || codes.size() != B)
        throw DimensionError("amplitude/code count does not match payload bit count");
    const std::size_t T = codes.empty() ? 0 : codes[0].size();
    std::vector<double> delta(T, 0.0);
    for (std::size_t j = 0; j < B; ++j) {
        if (codes[j].size() != T)
            throw DimensionError("spreading code " + std::to_string(j + 1) +
                                 " has inconsistent length");
        const double w = amplitudes[j] * payload.bits[j];
        for (std::size_t t = 0; t < T; ++t) delta[t] += w * codes[j][t];
    }
    return delta;
}

/// Derives all per-bit spreading codes (1-based bit indices) for T slots.
inline std::vector<std::vector<int>> derive_all_codes(const KeySet& keys, const Claim& claim,
                                                      std::size_t bit_count, std::size_t T) {
    std::vector<std::vector<int>> codes(bit_count);
    for (std::size_t j = 0; j < bit_count; ++j)
        codes[j] = derive_spreading_code(keys, claim, static_cast<std::uint32_t>(j + 1), T);
    return codes;
}

/// Embeds the claim-derived payload into `scene`. Returns the watermarked
/// scene plus the key-free record of embedding parameters. Throws
/// CapacityError when the carrier pool cannot safely hold bit_count bits.
inline std::pair<GaussianScene, EmbedRecord> embed(const GaussianScene& scene,
                                                   const KeySet& keys, const Claim& claim,
                                                   const EmbedConfig& cfg) {
    validate_embed_config(cfg);
    const FlatSHVector flat = flatten_sh(scene);
    const std::size_t L = flat.values.size();
    const CarrierPool pool = make_carrier_pool(L, cfg.band);
    const std::size_t T = pool.size;
    if (T < cfg.capacity_floor * cfg.bit_count)
        throw CapacityError("carrier pool has " + std::to_string(T) + " slots but " +
                            std::to_string(cfg.bit_count) + " bits require at least " +
                            std::to_string(cfg.capacity_floor * cfg.bit_count) +
                            "; enlarge the scene or band, or reduce the payload");

    const Payload payload = derive_payload(keys, claim, cfg.bit_count);
    const auto perm = derive_permutation(keys, claim, T);
    const auto codes = derive_all_codes(keys, claim, cfg.bit_count, T);
    const auto amplitudes = compute_amplitudes(cfg);

    std::vector<double> spectrum = dct(flat.values);
    std::vector<double> carriers = read_carriers(spectrum, pool, perm);
    const std::vector<double> delta = superpose_payload(amplitudes, payload, codes);
    for (std::size_t t = 0; t < T; ++t) carriers[t] += delta[t];
    write_carriers(spectrum, pool, perm, carriers);

    FlatSHVector marked = flat;
    marked.values = idct(spectrum);
    GaussianScene out = unflatten_sh(scene, marked);
    out.provenance = scene.provenance;

    EmbedRecord record;
    record.claim = claim.text;
    record.bit_count = cfg.bit_count;
    record.alpha = cfg.alpha;
    record.protocol = cfg.protocol;
    record.band = cfg.band;
    record.reference_bits = cfg.reference_bits;
    record.spectrum_length = L;
    record.carrier_count = T;
    record.gaussian_count = scene.size();
    record.sh_degree = scene.sh_degree;
    return {std::move(out), record};
}

} // namespace splatmark

#endif // SPLATMARK_WATERMARK_HPP
