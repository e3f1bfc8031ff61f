// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// Robustness attack matrix: model-level distortions of the Gaussian set,
// image-level distortions of rendered views, and the nearest-neighbor
// realignment that restores index correspondence before informed detection.

#ifndef SPLATMARK_ATTACKS_HPP
#define SPLATMARK_ATTACKS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "splatmark/error.hpp"
#include "splatmark/gs_model.hpp"
#include "splatmark/image.hpp"
#include "splatmark/rng.hpp"

namespace splatmark {

// --- model-level attacks --------------------------------------------------------

enum class ModelAttackKind { GAUSS_NOISE, DROPOUT, CROP3D, CLONE, TRANSLATE };

struct ModelAttackSpec {
    ModelAttackKind kind = ModelAttackKind::GAUSS_NOISE;
    double param = 0.0; // sigma / rate / keep_fraction / fraction per kind
    std::uint64_t seed = 0;
};

inline std::string to_string(ModelAttackKind k) {
    switch (k) {
        case ModelAttackKind::GAUSS_NOISE: return "GAUSS_NOISE";
        case ModelAttackKind::DROPOUT: return "DROPOUT";
        case ModelAttackKind::CROP3D: return "CROP3D";
        case ModelAttackKind::CLONE: return "CLONE";
        case ModelAttackKind::TRANSLATE: return "TRANSLATE";
    }
    return "GAUSS_NOISE";
}

inline ModelAttackKind model_attack_kind_from_string(const std::string& s) {
    if (s == "GAUSS_NOISE") return ModelAttackKind::GAUSS_NOISE;
    if (s == "DROPOUT") return ModelAttackKind::DROPOUT;
    if (s == "CROP3D") return ModelAttackKind::CROP3D;
    if (s == "CLONE") return ModelAttackKind::CLONE;
    if (s == "TRANSLATE") return ModelAttackKind::TRANSLATE;
    throw ConfigError("unknown model attack kind '" + s + "'");
}

inline void validate_model_attack(const ModelAttackSpec& spec) {
    if (spec.kind == ModelAttackKind::GAUSS_NOISE) {
        if (!(spec.param >= 0.0)) throw ConfigError("noise sigma must be >= 0");
    } else if (!(spec.param > 0.0 && spec.param <= 1.0)) {
        throw ConfigError(to_string(spec.kind) + " parameter must be in (0, 1]");
    }
}

namespace detail {

/// k distinct indices drawn uniformly from [0, n) via partial Fisher-Yates.
inline std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k && i < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(std::min(k, n));
    return idx;
}

/// Population standard deviation of each SH slot across the scene.
inline std::vector<double> sh_slot_stddevs(const GaussianScene& scene) {
    const std::size_t per = static_cast<std::size_t>(sh_coeff_count(scene.sh_degree));
    std::vector<double> mean(per, 0.0), sq(per, 0.0);
    const double n = static_cast<double>(scene.size());
    for (const auto& g : scene.gaussians)
        for (std::size_t s = 0; s < per; ++s) {
            mean[s] += g.sh[s];
            sq[s] += g.sh[s] * g.sh[s];
        }
    std::vector<double> std_dev(per, 0.0);
    for (std::size_t s = 0; s < per; ++s) {
        const double m = mean[s] / n;
        std_dev[s] = std::sqrt(std::max(0.0, sq[s] / n - m * m));
    }
    return std_dev;
}

} // namespace detail

/// Applies one model-level attack; deterministic under (spec, seed).
inline GaussianScene attack_model(const GaussianScene& scene, const ModelAttackSpec& spec) {
    validate_model_attack(spec);
    if (scene.gaussians.empty()) throw DataError("cannot attack an empty scene");
    Rng rng(spec.seed);
    GaussianScene out = scene;

    switch (spec.kind) {
        case ModelAttackKind::GAUSS_NOISE: {
            // Noise std is relative to the per-slot population std so the
            // attack strength is scale-free across scenes.
            const auto std_dev = detail::sh_slot_stddevs(scene);
            for (auto& g : out.gaussians)
                for (std::size_t s = 0; s < g.sh.size(); ++s)
                    g.sh[s] += rng.normal() * spec.param * std_dev[s];
            break;
        }
        case ModelAttackKind::DROPOUT: {
            const std::size_t remove =
                static_cast<std::size_t>(std::floor(spec.param * static_cast<double>(scene.size())));
            auto doomed = detail::sample_indices(rng, scene.size(), remove);
            std::vector<bool> drop(scene.size(), false);
            for (const std::size_t i : doomed) drop[i] = true;
            out.gaussians.clear();
            for (std::size_t i = 0; i < scene.size(); ++i)
                if (!drop[i]) out.gaussians.push_back(scene.gaussians[i]);
            break;
        }
        case ModelAttackKind::CROP3D: {
            const Bbox box = scene_bbox(scene);
            const Vec3 c = box.center();
            const Vec3 half = 0.5 * std::cbrt(spec.param) * box.extent();
            out.gaussians.clear();
            for (const auto& g : scene.gaussians) {
                const Vec3 d = (g.center - c).cwiseAbs();
                if (d[0] <= half[0] && d[1] <= half[1] && d[2] <= half[2])
                    out.gaussians.push_back(g);
            }
            if (out.gaussians.empty())
                throw DegenerateOutputError("3D crop with keep fraction " +
                                            std::to_string(spec.param) +
                                            " removed every gaussian");
            break;
        }
        case ModelAttackKind::CLONE: {
            const std::size_t copies =
                static_cast<std::size_t>(std::floor(spec.param * static_cast<double>(scene.size())));
            const double jitter = 1e-3 * scene_bbox(scene).diagonal();
            const auto chosen = detail::sample_indices(rng, scene.size(), copies);
            for (const std::size_t i : chosen) {
                Gaussian g = scene.gaussians[i];
                for (int a = 0; a < 3; ++a) g.center[a] += rng.normal() * jitter;
                out.gaussians.push_back(std::move(g));
            }
            break;
        }
        case ModelAttackKind::TRANSLATE: {
            const Vec3 shift(spec.param * scene_bbox(scene).diagonal(), 0.0, 0.0);
            for (auto& g : out.gaussians) g.center += shift;
            break;
        }
    }
    return out;
}

// --- image-level attacks --------------------------------------------------------

enum class ImageAttackKind { GAUSS_NOISE, BLUR, CROP2D, RESIZE, BRIGHTNESS, JPEG_LIKE, ROTATE };

struct ImageAttackSpec {
    ImageAttackKind kind = ImageAttackKind::GAUSS_NOISE;
    double param = 0.0; // sigma / fraction / scale / factor / quality / angle
    std::uint64_t seed = 0;
};

inline std::string to_string(ImageAttackKind k) {
    switch (k) {
        case ImageAttackKind::GAUSS_NOISE: return "GAUSS_NOISE";
        case ImageAttackKind::BLUR: return "BLUR";
        case ImageAttackKind::CROP2D: return "CROP2D";
        case ImageAttackKind::RESIZE: return "RESIZE";
        case ImageAttackKind::BRIGHTNESS: return "BRIGHTNESS";
        case ImageAttackKind::JPEG_LIKE: return "JPEG_LIKE";
        case ImageAttackKind::ROTATE: return "ROTATE";
    }
    return "GAUSS_NOISE";
}

inline ImageAttackKind image_attack_kind_from_string(const std::string& s) {
    if (s == "GAUSS_NOISE") return ImageAttackKind::GAUSS_NOISE;
    if (s == "BLUR") return ImageAttackKind::BLUR;
    if (s == "CROP2D") return ImageAttackKind::CROP2D;
    if (s == "RESIZE") return ImageAttackKind::RESIZE;
    if (s == "BRIGHTNESS") return ImageAttackKind::BRIGHTNESS;
    if (s == "JPEG_LIKE") return ImageAttackKind::JPEG_LIKE;
    if (s == "ROTATE") return ImageAttackKind::ROTATE;
    throw ConfigError("unknown image attack kind '" + s + "'");
}

inline void validate_image_attack(const ImageAttackSpec& spec) {
    switch (spec.kind) {
        case ImageAttackKind::GAUSS_NOISE:
        case ImageAttackKind::BLUR:
            if (!(spec.param >= 0.0)) throw ConfigError("sigma must be >= 0");
            break;
        case ImageAttackKind::CROP2D:
            if (!(spec.param > 0.0 && spec.param <= 1.0))
                throw ConfigError("crop fraction must be in (0, 1]");
            break;
        case ImageAttackKind::RESIZE:
            if (!(spec.param > 0.0)) throw ConfigError("resize scale must be > 0");
            break;
        case ImageAttackKind::BRIGHTNESS:
            if (!(spec.param >= 0.0)) throw ConfigError("brightness factor must be >= 0");
            break;
        case ImageAttackKind::JPEG_LIKE:
            if (!(spec.param >= 1.0 && spec.param <= 100.0))
                throw ConfigError("JPEG quality must be in [1, 100]");
            break;
        case ImageAttackKind::ROTATE:
            break; // any angle in radians
    }
}

namespace detail {

/// Bilinear sample at continuous pixel-center coordinates; `zero_outside`
/// selects black fill (rotation) vs edge clamp (resize).
inline double bilinear(const Image& img, double x, double y, int c, bool zero_outside) {
    const double fx = x - 0.5;
    const double fy = y - 0.5;
    int x0 = static_cast<int>(std::floor(fx));
    int y0 = static_cast<int>(std::floor(fy));
    const double tx = fx - x0;
    const double ty = fy - y0;
    double acc = 0.0;
    for (int dy = 0; dy <= 1; ++dy) {
        for (int dx = 0; dx <= 1; ++dx) {
            const double w = (dx ? tx : 1.0 - tx) * (dy ? ty : 1.0 - ty);
            int sx = x0 + dx;
            int sy = y0 + dy;
            if (sx < 0 || sx >= img.width || sy < 0 || sy >= img.height) {
                if (zero_outside) continue; // contributes black
                sx = std::clamp(sx, 0, img.width - 1);
                sy = std::clamp(sy, 0, img.height - 1);
            }
            acc += w * img.at(sx, sy, c);
        }
    }
    return acc;
}

inline Image resize_bilinear(const Image& src, int w, int h) {
    Image dst(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double sx = (x + 0.5) * src.width / static_cast<double>(w);
            const double sy = (y + 0.5) * src.height / static_cast<double>(h);
            for (int c = 0; c < 3; ++c) dst.at(x, y, c) = detail::bilinear(src, sx, sy, c, false);
        }
    return dst;
}

// Standard JPEG luminance quantization table, zig-zag-free row-major order.
inline constexpr int kJpegLuminanceTable[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,  //
    12, 12, 14, 19, 26,  58,  60,  55,  //
    14, 13, 16, 24, 40,  57,  69,  56,  //
    14, 17, 22, 29, 51,  87,  80,  62,  //
    18, 22, 37, 56, 68,  109, 103, 77,  //
    24, 35, 55, 64, 81,  104, 113, 92,  //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99};

/// Orthonormal 8x8 DCT-II basis matrix (the JPEG transform).
inline const std::array<double, 64>& jpeg_dct_matrix() {
    static const std::array<double, 64> m = [] {
        std::array<double, 64> c{};
        for (int k = 0; k < 8; ++k) {
            const double s = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            for (int n = 0; n < 8; ++n)
                c[static_cast<std::size_t>(k) * 8 + n] =
                    s * std::cos((2.0 * n + 1.0) * k * M_PI / 16.0);
        }
        return c;
    }();
    return m;
}

} // namespace detail

/// Applies one image-level attack; deterministic under (spec, seed).
inline Image attack_image(const Image& img, const ImageAttackSpec& spec) {
    validate_image_attack(spec);
    Rng rng(spec.seed);
    switch (spec.kind) {
        case ImageAttackKind::GAUSS_NOISE: {
            Image out = img;
            for (double& v : out.rgb) v = std::clamp(v + rng.normal() * spec.param, 0.0, 1.0);
            return out;
        }
        case ImageAttackKind::BLUR: {
            if (spec.param == 0.0) return img;
            const int radius = static_cast<int>(std::ceil(3.0 * spec.param));
            std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
            double sum = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                kernel[static_cast<std::size_t>(i + radius)] =
                    std::exp(-0.5 * i * i / (spec.param * spec.param));
                sum += kernel[static_cast<std::size_t>(i + radius)];
            }
            for (double& w : kernel) w /= sum;
            // Separable convolution with edge replication.
            Image tmp = img;
            for (int y = 0; y < img.height; ++y)
                for (int x = 0; x < img.width; ++x)
                    for (int c = 0; c < 3; ++c) {
                        double acc = 0.0;
                        for (int i = -radius; i <= radius; ++i)
                            acc += kernel[static_cast<std::size_t>(i + radius)] *
                                   img.at(std::clamp(x + i, 0, img.width - 1), y, c);
                        tmp.at(x, y, c) = acc;
                    }
            Image out = tmp;
            for (int y = 0; y < img.height; ++y)
                for (int x = 0; x < img.width; ++x)
                    for (int c = 0; c < 3; ++c) {
                        double acc = 0.0;
                        for (int i = -radius; i <= radius; ++i)
                            acc += kernel[static_cast<std::size_t>(i + radius)] *
                                   tmp.at(x, std::clamp(y + i, 0, img.height - 1), c);
                        out.at(x, y, c) = acc;
                    }
            return out;
        }
        case ImageAttackKind::CROP2D: {
            const double side = std::sqrt(spec.param);
            const int kw = static_cast<int>(std::lround(img.width * side));
            const int kh = static_cast<int>(std::lround(img.height * side));
            const int x0 = (img.width - kw) / 2;
            const int y0 = (img.height - kh) / 2;
            Image out(img.width, img.height);
            for (int y = y0; y < y0 + kh; ++y)
                for (int x = x0; x < x0 + kw; ++x)
                    for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, y, c);
            return out;
        }
        case ImageAttackKind::RESIZE: {
            const int w = std::max(1, static_cast<int>(std::lround(img.width * spec.param)));
            const int h = std::max(1, static_cast<int>(std::lround(img.height * spec.param)));
            return detail::resize_bilinear(detail::resize_bilinear(img, w, h), img.width,
                                           img.height);
        }
        case ImageAttackKind::BRIGHTNESS: {
            Image out = img;
            for (double& v : out.rgb) v = std::clamp(v * spec.param, 0.0, 1.0);
            return out;
        }
        case ImageAttackKind::JPEG_LIKE: {
            const double q = spec.param;
            const double scale_pct = q < 50.0 ? 5000.0 / q : 200.0 - 2.0 * q;
            double steps[64];
            for (int i = 0; i < 64; ++i)
                steps[i] = std::clamp(
                    std::floor((detail::kJpegLuminanceTable[i] * scale_pct + 50.0) / 100.0), 1.0,
                    255.0);
            const auto& dctm = detail::jpeg_dct_matrix();
            const int bw = (img.width + 7) / 8;
            const int bh = (img.height + 7) / 8;
            Image out = img;
            double block[64], tmp[64], coef[64];
            for (int by = 0; by < bh; ++by) {
                for (int bx = 0; bx < bw; ++bx) {
                    for (int c = 0; c < 3; ++c) {
                        // Gather with edge replication, centered on [-128,127].
                        for (int y = 0; y < 8; ++y)
                            for (int x = 0; x < 8; ++x) {
                                const int sx = std::min(bx * 8 + x, img.width - 1);
                                const int sy = std::min(by * 8 + y, img.height - 1);
                                block[y * 8 + x] = img.at(sx, sy, c) * 255.0 - 128.0;
                            }
                        // coef = C * block * C^T, quantize, reconstruct.
                        for (int y = 0; y < 8; ++y)
                            for (int x = 0; x < 8; ++x) {
                                double s = 0.0;
                                for (int n = 0; n < 8; ++n) s += dctm[y * 8 + n] * block[n * 8 + x];
                                tmp[y * 8 + x] = s;
                            }
                        for (int y = 0; y < 8; ++y)
                            for (int x = 0; x < 8; ++x) {
                                double s = 0.0;
                                for (int n = 0; n < 8; ++n) s += tmp[y * 8 + n] * dctm[x * 8 + n];
                                coef[y * 8 + x] =
                                    std::round(s / steps[y * 8 + x]) * steps[y * 8 + x];
                            }
                        for (int y = 0; y < 8; ++y)
                            for (int x = 0; x < 8; ++x) {
                                double s = 0.0;
                                for (int n = 0; n < 8; ++n) s += dctm[n * 8 + y] * coef[n * 8 + x];
                                tmp[y * 8 + x] = s;
                            }
                        for (int y = 0; y < 8; ++y)
                            for (int x = 0; x < 8; ++x) {
                                double s = 0.0;
                                for (int n = 0; n < 8; ++n) s += tmp[y * 8 + n] * dctm[n * 8 + x];
                                block[y * 8 + x] = s;
                            }
                        for (int y = 0; y < 8; ++y)
                            for (int x = 0; x < 8; ++x) {
                                const int dx = bx * 8 + x;
                                const int dy = by * 8 + y;
                                if (dx < img.width && dy < img.height)
                                    out.at(dx, dy, c) =
                                        std::clamp((block[y * 8 + x] + 128.0) / 255.0, 0.0, 1.0);
                            }
                    }
                }
            }
            return out;
        }
        case ImageAttackKind::ROTATE: {
            const double ca = std::cos(spec.param);
            const double sa = std::sin(spec.param);
            const double cx = 0.5 * img.width;
            const double cy = 0.5 * img.height;
            Image out(img.width, img.height);
            for (int y = 0; y < img.height; ++y)
                for (int x = 0; x < img.width; ++x) {
                    const double dx = x + 0.5 - cx;
                    const double dy = y + 0.5 - cy;
                    const double sx = cx + ca * dx + sa * dy; // inverse rotation
                    const double sy = cy - sa * dx + ca * dy;
                    for (int c = 0; c < 3; ++c)
                        out.at(x, y, c) = detail::bilinear(img, sx, sy, c, true);
                }
            return out;
        }
    }
    throw ConfigError("unhandled image attack kind");
}

// --- realignment -----------------------------------------------------------------

/// Restores original indexing after attacks that permute, remove, or append
/// Gaussians. Greedy global nearest-neighbor on centers, resolved in rounds:
/// each round every unmatched original proposes its nearest unmatched suspect
/// and proposals are granted in ascending distance order, so exact matches are
/// never stolen by displaced neighbors. Unmatched originals are neutralized by
/// keeping their own parameters (zero residual at detection).
inline GaussianScene realign(const GaussianScene& original, const GaussianScene& suspect) {
    if (suspect.gaussians.empty()) throw AlignmentError("suspect scene is empty");
    if (suspect.sh_degree != original.sh_degree)
        throw AlignmentError("suspect SH degree " + std::to_string(suspect.sh_degree) +
                             " does not match original " + std::to_string(original.sh_degree));

    const std::size_t n = original.size();
    const std::size_t m = suspect.size();
    std::vector<std::int64_t> match(n, -1);
    std::vector<bool> suspect_taken(m, false);
    std::vector<std::size_t> open(n);
    std::iota(open.begin(), open.end(), std::size_t{0});
    std::size_t suspects_left = m;

    struct Proposal {
        double dist2;
        std::size_t orig;
        std::size_t susp;
    };
    // Each round is O(open * m); rounds shrink geometrically in practice, and
    // the loop terminates once either side is exhausted.
    while (!open.empty() && suspects_left > 0) {
        std::vector<Proposal> proposals;
        proposals.reserve(open.size());
        for (const std::size_t oi : open) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_j = 0;
            bool found = false;
            for (std::size_t j = 0; j < m; ++j) {
                if (suspect_taken[j]) continue;
                const double d2 =
                    (original.gaussians[oi].center - suspect.gaussians[j].center).squaredNorm();
                if (d2 < best) {
                    best = d2;
                    best_j = j;
                    found = true;
                }
            }
            if (found) proposals.push_back({best, oi, best_j});
        }
        std::sort(proposals.begin(), proposals.end(), [](const Proposal& a, const Proposal& b) {
            if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
            return a.orig < b.orig;
        });
        std::vector<std::size_t> still_open;
        std::vector<bool> orig_done_this_round(n, false);
        for (const auto& p : proposals) {
            if (suspect_taken[p.susp]) continue; // lost the race this round
            suspect_taken[p.susp] = true;
            match[p.orig] = static_cast<std::int64_t>(p.susp);
            orig_done_this_round[p.orig] = true;
            --suspects_left;
        }
        for (const std::size_t oi : open)
            if (!orig_done_this_round[oi]) still_open.push_back(oi);
        open.swap(still_open);
    }

    GaussianScene out = original;
    for (std::size_t i = 0; i < n; ++i)
        if (match[i] >= 0) out.gaussians[i] = suspect.gaussians[static_cast<std::size_t>(match[i])];
    return out;
}

// --- attack manifests ------------------------------------------------------------

/// One manifest entry: a model- or image-level attack with its parameters.
struct AttackEntry {
    std::string level; // "model" | "image"
    ModelAttackSpec model{};
    ImageAttackSpec image{};
    std::string label;
};

inline double attack_param_from_json(const nlohmann::json& params, const std::string& key) {
    if (!params.contains(key))
        throw SchemaError("attack params missing required key '" + key + "'");
    return params.at(key).get<double>();
}

inline std::vector<AttackEntry> parse_attack_manifest(const nlohmann::json& j) {
    if (!j.is_array()) throw SchemaError("attack manifest must be a JSON array");
    std::vector<AttackEntry> entries;
    for (const auto& e : j) {
        AttackEntry entry;
        entry.level = e.at("level").get<std::string>();
        const std::string kind = e.at("kind").get<std::string>();
        const nlohmann::json params = e.value("params", nlohmann::json::object());
        const std::uint64_t seed = e.value("seed", std::uint64_t{0});
        if (entry.level == "model") {
            entry.model.kind = model_attack_kind_from_string(kind);
            entry.model.seed = seed;
            switch (entry.model.kind) {
                case ModelAttackKind::GAUSS_NOISE:
                    entry.model.param = attack_param_from_json(params, "sigma");
                    break;
                case ModelAttackKind::DROPOUT:
                case ModelAttackKind::CLONE:
                    entry.model.param = attack_param_from_json(params, "rate");
                    break;
                case ModelAttackKind::CROP3D:
                    entry.model.param = attack_param_from_json(params, "keep_fraction");
                    break;
                case ModelAttackKind::TRANSLATE:
                    entry.model.param = attack_param_from_json(params, "fraction");
                    break;
            }
            validate_model_attack(entry.model);
        } else if (entry.level == "image") {
            entry.image.kind = image_attack_kind_from_string(kind);
            entry.image.seed = seed;
            switch (entry.image.kind) {
                case ImageAttackKind::GAUSS_NOISE:
                case ImageAttackKind::BLUR:
                    entry.image.param = attack_param_from_json(params, "sigma");
                    break;
                case ImageAttackKind::CROP2D:
                    entry.image.param = attack_param_from_json(params, "fraction");
                    break;
                case ImageAttackKind::RESIZE:
                    entry.image.param = attack_param_from_json(params, "scale");
                    break;
                case ImageAttackKind::BRIGHTNESS:
                    entry.image.param = attack_param_from_json(params, "factor");
                    break;
                case ImageAttackKind::JPEG_LIKE:
                    entry.image.param = attack_param_from_json(params, "quality");
                    break;
                case ImageAttackKind::ROTATE:
                    entry.image.param = attack_param_from_json(params, "angle");
                    break;
            }
            validate_image_attack(entry.image);
        } else {
            throw SchemaError("attack level must be 'model' or 'image', got '" + entry.level +
                              "'");
        }
        entry.label = e.value("label", entry.level + ":" + kind);
        entries.push_back(std::move(entry));
    }
    return entries;
}

} // namespace splatmark

#endif // SPLATMARK_ATTACKS_HPP
