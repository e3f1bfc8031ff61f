// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// Informed detection: correlates the suspect-minus-original carrier residual
// against the keyed spreading codes, decodes bits by correlation sign, and
// scores presence against the fixed threshold.

#ifndef SPLATMARK_DETECT_HPP
#define SPLATMARK_DETECT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "splatmark/error.hpp"
#include "splatmark/gs_model.hpp"
#include "splatmark/keying.hpp"
#include "splatmark/transform.hpp"
#include "splatmark/watermark.hpp"

namespace splatmark {

inline constexpr double kPresenceThreshold = 0.5;

struct DetectOptions {
    double rho = 1.0; // fraction of carriers the detector reads
    double presence_threshold = kPresenceThreshold;
};

struct DetectionResult {
    bool present = false;
    double presence_score = 0.0;    // mean_j |S_j| / (alpha_j * |Omega|)
    double normalized_margin = 0.0; // min_j  |S_j| / (alpha_j * |Omega|)
    double bit_accuracy = 0.0;      // decoded bits vs claim-derived payload
    std::size_t carriers_used = 0;  // |Omega|
    std::vector<int> decoded_bits;  // in {-1, +1}
    std::vector<double> correlations; // S_j
};

inline nlohmann::json detection_to_json(const DetectionResult& r) {
    return nlohmann::json{{"schema", "splatmark/detection/v1"},
                          {"present", r.present},
                          {"presence_score", r.presence_score},
                          {"normalized_margin", r.normalized_margin},
                          {"bit_accuracy", r.bit_accuracy},
                          {"carriers_used", r.carriers_used},
                          {"decoded_bits", r.decoded_bits},
                          {"correlations", r.correlations}};
}

/// Correlation decode over an already-extracted residual restricted to the
/// first |residual| carrier slots. Exposed separately so the statistics can
/// be exercised against hand-computed values.
inline DetectionResult decode_residual(const std::vector<double>& residual,
                                       const std::vector<std::vector<int>>& codes,
                                       const std::vector<double>& amplitudes,
                                       double presence_threshold) {
    const std::size_t m = residual.size();
    const std::size_t B = codes.size();
    if (amplitudes.size() != B)
        throw DimensionError("amplitude count does not match spreading code count");
    if (m == 0) throw DimensionError("detector carrier subset is empty");

    DetectionResult result;
    result.carriers_used = m;
    result.decoded_bits.resize(B);
    result.correlations.resize(B);
    double score_sum = 0.0;
    double score_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < B; ++j) {
        if (codes[j].size() < m)
            throw DimensionError("spreading code " + std::to_string(j + 1) +
                                 " shorter than detector subset");
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += residual[i] * codes[j][i];
        result.correlations[j] = s;
        result.decoded_bits[j] = s >= 0.0 ? 1 : -1;
        const double score = std::abs(s) / (amplitudes[j] * static_cast<double>(m));
        score_sum += score;
        score_min = std::min(score_min, score);
    }
    result.presence_score = score_sum / static_cast<double>(B);
    result.normalized_margin = score_min;
    result.present = result.presence_score >= presence_threshold;
    return result;
}

/// Full informed detection against a suspect scene. The suspect must already
/// be aligned with the original (same Gaussian count, order and SH degree);
/// otherwise run realignment first.
inline DetectionResult detect_model(const GaussianScene& original, const GaussianScene& suspect,
                                    const KeySet& keys, const EmbedRecord& record,
                                    const DetectOptions& opts = {}) {
    if (!(opts.rho > 0.0 && opts.rho <= 1.0))
        throw ConfigError("detector budget rho must be in (0, 1]");
    if (suspect.sh_degree != original.sh_degree || suspect.size() != original.size())
        throw AlignmentError(
            "suspect scene shape (" + std::to_string(suspect.size()) + " gaussians, degree " +
            std::to_string(suspect.sh_degree) + ") does not match original (" +
            std::to_string(original.size()) + ", degree " + std::to_string(original.sh_degree) +
            "); realign the suspect before detection");

    const Claim claim(record.claim);
    const FlatSHVector flat_orig = flatten_sh(original);
    const FlatSHVector flat_susp = flatten_sh(suspect);
    const std::size_t L = flat_orig.values.size();
    if (record.spectrum_length != 0 && record.spectrum_length != L)
        throw DataError("embed record spectrum length " + std::to_string(record.spectrum_length) +
                        " does not match original scene (" + std::to_string(L) + ")");

    const CarrierPool pool = make_carrier_pool(L, record.band);
    const std::size_t T = pool.size;
    if (record.carrier_count != 0 && record.carrier_count != T)
        throw DataError("embed record carrier count " + std::to_string(record.carrier_count) +
                        " does not match derived pool size " + std::to_string(T));
    if (T == 0) throw CapacityError("carrier pool is empty; nothing to detect");

    const auto subset = derive_detector_subset(keys, claim, T, opts.rho);
    const std::vector<double> spec_orig = dct(flat_orig.values);
    const std::vector<double> spec_susp = dct(flat_susp.values);
    const std::vector<double> c_orig = read_carriers(spec_orig, pool, subset);
    const std::vector<double> c_susp = read_carriers(spec_susp, pool, subset);
    std::vector<double> residual(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i) residual[i] = c_susp[i] - c_orig[i];

    const auto codes = derive_all_codes(keys, claim, record.bit_count, T);
    const auto amplitudes = compute_amplitudes(embed_config_from_record(record));
    DetectionResult result =
        decode_residual(residual, codes, amplitudes, opts.presence_threshold);

    const Payload expected = derive_payload(keys, claim, record.bit_count);
    std::size_t matches = 0;
    for (std::size_t j = 0; j < expected.bits.size(); ++j)
        if (result.decoded_bits[j] == expected.bits[j]) ++matches;
    result.bit_accuracy =
        static_cast<double>(matches) / static_cast<double>(expected.bits.size());
    return result;
}

} // namespace splatmark

#endif // SPLATMARK_DETECT_HPP
