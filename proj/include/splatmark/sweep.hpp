// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// Sweep harness: drives embed/render/attack/detect grids from a JSON manifest
// and emits versioned CSV tables (fidelity over an alpha x B grid, robustness
// under an attack suite) plus amplified difference images. All outputs are
// byte-deterministic for a fixed manifest + keyset.

#ifndef SPLATMARK_SWEEP_HPP
#define SPLATMARK_SWEEP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "splatmark/attacks.hpp"
#include "splatmark/detect.hpp"
#include "splatmark/error.hpp"
#include "splatmark/fsutil.hpp"
#include "splatmark/gs_model.hpp"
#include "splatmark/image.hpp"
#include "splatmark/keying.hpp"
#include "splatmark/metrics.hpp"
#include "splatmark/render.hpp"
#include "splatmark/threatmodel.hpp"
#include "splatmark/watermark.hpp"

namespace splatmark {

struct SceneSource {
    enum class Type { SYNTH, PLY } type = Type::SYNTH;
    // SYNTH parameters
    std::uint64_t seed = 0;
    std::size_t n = 4096;
    int degree = 3;
    double extent = 1.0;
    bool seed_set = false;
    // PLY parameter
    std::string path;
};

struct SweepManifest {
    SceneSource scene;
    std::vector<double> alphas = {0.1, 0.01, 0.001};
    std::vector<std::size_t> bit_grid = {32, 48, 64};
    EnergyProtocol protocol = EnergyProtocol::FIXED_PER_BIT;
    Band band{};
    std::string claim = "sweep";
    double robustness_alpha = 0.01;
    std::vector<AttackEntry> attacks;
    AccessVector access{{0, 1, 1, 0, 0, 1, 0}}; // grey-box tracing default
    std::vector<Camera> cameras;                // empty -> derived ring
    int view_width = 128;
    int view_height = 128;
    std::uint64_t seed = 0;
    std::string output_dir = "sweep-out";
};

inline SceneSource scene_source_from_json(const nlohmann::json& j) {
    SceneSource src;
    const std::string type = j.at("type").get<std::string>();
    if (type == "synth") {
        src.type = SceneSource::Type::SYNTH;
        src.seed_set = j.contains("seed");
        src.seed = j.value("seed", std::uint64_t{0});
        src.n = j.value("n", std::size_t{4096});
        src.degree = j.value("degree", 3);
        src.extent = j.value("extent", 1.0);
    } else if (type == "ply") {
        src.type = SceneSource::Type::PLY;
        src.path = j.at("path").get<std::string>();
    } else {
        throw SchemaError("scene source type must be 'synth' or 'ply', got '" + type + "'");
    }
    return src;
}

inline GaussianScene load_scene_source(const SceneSource& src, std::uint64_t fallback_seed) {
    if (src.type == SceneSource::Type::SYNTH)
        return synth_scene(src.seed_set ? src.seed : fallback_seed, src.n, src.degree,
                           src.extent);
    return load_ply_file(src.path);
}

inline SweepManifest parse_sweep_manifest(const nlohmann::json& j) {
    SweepManifest m;
    m.scene = scene_source_from_json(j.at("scene"));
    if (j.contains("alphas")) m.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("bits")) m.bit_grid = j.at("bits").get<std::vector<std::size_t>>();
    if (m.alphas.empty()) throw SchemaError("sweep manifest alpha grid is empty");
    if (m.bit_grid.empty()) throw SchemaError("sweep manifest bit grid is empty");
    if (j.contains("protocol")) m.protocol = protocol_from_string(j.at("protocol"));
    if (j.contains("band")) {
        m.band.lo = j.at("band").at("lo").get<double>();
        m.band.hi = j.at("band").at("hi").get<double>();
    }
    validate_band(m.band);
    m.claim = j.value("claim", m.claim);
    m.robustness_alpha = j.value("robustness_alpha", m.robustness_alpha);
    if (j.contains("attacks")) m.attacks = parse_attack_manifest(j.at("attacks"));
    if (j.contains("scenario")) {
        m.access = find_scenario(j.at("scenario").get<std::string>()).vector;
    } else if (j.contains("access_vector")) {
        m.access = access_vector_from_json(j.at("access_vector"));
    }
    if (j.contains("cameras"))
        for (const auto& c : j.at("cameras")) m.cameras.push_back(camera_from_json(c));
    m.view_width = j.value("view_width", m.view_width);
    m.view_height = j.value("view_height", m.view_height);
    m.seed = j.value("seed", m.seed);
    m.output_dir = j.value("output_dir", m.output_dir);
    validate_attack_access(m.attacks, m.access);
    return m;
}

/// Deterministic camera ring around the scene: `count` viewpoints at fixed
/// azimuth steps, slightly elevated, looking at the bbox center.
inline std::vector<Camera> default_cameras(const GaussianScene& scene, std::size_t count,
                                           int width, int height) {
    const Bbox box = scene_bbox(scene);
    const Vec3 center = box.center();
    const double diag = box.diagonal();
    const double radius = diag > 1e-9 ? 1.5 * diag : 1.0;
    std::vector<Camera> cams;
    cams.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double az = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(count);
        const Vec3 dir(std::cos(az) * 0.94, 0.342, std::sin(az) * 0.94); // ~20 deg elevation
        const Vec3 pos = center + radius * dir.normalized();
        cams.push_back(look_at(pos, center, Vec3(0, 1, 0), 0.9 * width, width, height,
                               0.05 * radius, 10.0 * radius));
    }
    return cams;
}

struct SweepResult {
    std::string fidelity_csv;
    std::string robustness_csv;
    std::vector<std::string> written_files;
};

namespace detail {

/// %g-style compact formatting for grid values used in filenames and CSVs.
inline std::string format_compact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace detail

/// Runs the full grid. Writes fidelity.csv, robustness.csv (when attacks are
/// declared) and per-alpha x10 difference PPMs into manifest.output_dir.
inline SweepResult run_sweep(const SweepManifest& manifest, const KeySet& keys) {
    validate_attack_access(manifest.attacks, manifest.access);
    const GaussianScene scene = load_scene_source(manifest.scene, manifest.seed);
    const Claim claim(manifest.claim);
    std::vector<Camera> cameras = manifest.cameras;
    if (cameras.empty())
        cameras = default_cameras(scene, 3, manifest.view_width, manifest.view_height);

    std::vector<Image> reference;
    reference.reserve(cameras.size());
    for (const auto& cam : cameras) reference.push_back(render(scene, cam));

    SweepResult result;
    // --- fidelity grid (rows alpha, column groups B) ---
    std::string fidelity = "# schema: splatmark/fidelity-sweep/v1\nalpha";
    for (const std::size_t b : manifest.bit_grid)
        fidelity += ",psnr_b" + std::to_string(b) + ",ssim_b" + std::to_string(b);
    fidelity += "\n";

    struct MarkedCell {
        double alpha;
        std::size_t bits;
        GaussianScene scene;
    };
    std::vector<MarkedCell> cells;
    for (const double alpha : manifest.alphas) {
        fidelity += detail::format_compact(alpha);
        for (const std::size_t bits : manifest.bit_grid) {
            EmbedConfig cfg;
            cfg.bit_count = bits;
            cfg.alpha = alpha;
            cfg.protocol = manifest.protocol;
            cfg.band = manifest.band;
            auto [marked, record] = embed(scene, keys, claim, cfg);
            (void)record;
            double psnr_sum = 0.0, ssim_sum = 0.0;
            for (std::size_t v = 0; v < cameras.size(); ++v) {
                const Image img = render(marked, cameras[v]);
                psnr_sum += psnr(reference[v], img);
                ssim_sum += ssim(reference[v], img);
            }
            const double n = static_cast<double>(cameras.size());
            fidelity += "," + format_fixed(psnr_sum / n) + "," + format_fixed(ssim_sum / n);
            if (bits == manifest.bit_grid.front())
                cells.push_back({alpha, bits, std::move(marked)});
        }
        fidelity += "\n";
    }
    result.fidelity_csv = fidelity;

    // --- x10 difference images at the first payload size ---
    for (const auto& cell : cells) {
        const Image marked_view = render(cell.scene, cameras[0]);
        const Image diff = diff_image(reference[0], marked_view, 10.0);
        const std::string name =
            "diff_alpha_" + detail::format_compact(cell.alpha) + ".ppm";
        const auto bytes = encode_ppm(diff);
        write_file_atomic(manifest.output_dir + "/" + name, bytes);
        result.written_files.push_back(manifest.output_dir + "/" + name);
    }

    // --- robustness under the attack suite (rows attack x B) ---
    if (!manifest.attacks.empty()) {
        std::string robustness =
            "# schema: splatmark/robustness-sweep/v1\nattack,level,bits,alpha,bit_accuracy,"
            "view_psnr_db\n";
        for (const auto& entry : manifest.attacks) {
            for (const std::size_t bits : manifest.bit_grid) {
                EmbedConfig cfg;
                cfg.bit_count = bits;
                cfg.alpha = manifest.robustness_alpha;
                cfg.protocol = manifest.protocol;
                cfg.band = manifest.band;
                auto [marked, record] = embed(scene, keys, claim, cfg);

                double bit_accuracy = 0.0;
                double view_psnr = 0.0;
                const Image marked_view = render(marked, cameras[0]);
                if (entry.level == "model") {
                    const GaussianScene attacked = attack_model(marked, entry.model);
                    const GaussianScene aligned =
                        attacked.size() == marked.size() ? attacked : realign(scene, attacked);
                    bit_accuracy =
                        detect_model(scene, aligned, keys, record, DetectOptions{}).bit_accuracy;
                    view_psnr = psnr(marked_view, render(attacked, cameras[0]));
                } else {
                    // Image-level attacks distort distributed renders, not the
                    // asset; detection still runs against the intact model.
                    const Image attacked_view = attack_image(marked_view, entry.image);
                    bit_accuracy =
                        detect_model(scene, marked, keys, record, DetectOptions{}).bit_accuracy;
                    view_psnr = psnr(marked_view, attacked_view);
                }
                robustness += entry.label + "," + entry.level + "," + std::to_string(bits) + "," +
                              detail::format_compact(manifest.robustness_alpha) + "," +
                              format_fixed(bit_accuracy) + "," + format_fixed(view_psnr) + "\n";
            }
        }
        result.robustness_csv = robustness;
        write_file_atomic(manifest.output_dir + "/robustness.csv", robustness);
        result.written_files.push_back(manifest.output_dir + "/robustness.csv");
    }

    write_file_atomic(manifest.output_dir + "/fidelity.csv", result.fidelity_csv);
    result.written_files.push_back(manifest.output_dir + "/fidelity.csv");
    return result;
}

} // namespace splatmark

#endif // SPLATMARK_SWEEP_HPP
