// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// Image fidelity metrics between rendered views: PSNR over all RGB channels
// jointly (peak 1.0, capped at 99 dB) and single-scale SSIM on Rec.601 luma.

#ifndef SPLATMARK_METRICS_HPP
#define SPLATMARK_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "splatmark/error.hpp"
#include "splatmark/image.hpp"

namespace splatmark {

inline constexpr double kPsnrCap = 99.0;

/// 10*log10(1/MSE) with unit peak; identical images hit the 99 dB cap.
inline double psnr(const Image& a, const Image& b) {
    require_same_shape(a, b);
    double se = 0.0;
    for (std::size_t i = 0; i < a.rgb.size(); ++i) {
        const double d = a.rgb[i] - b.rgb[i];
        se += d * d;
    }
    const double mse = se / static_cast<double>(a.rgb.size());
    if (mse <= 0.0) return kPsnrCap;
    return std::clamp(10.0 * std::log10(1.0 / mse), 0.0, kPsnrCap);
}

namespace detail {

inline std::vector<double> luma_plane(const Image& img) {
    std::vector<double> y(img.pixel_count());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = 0.299 * img.rgb[3 * i] + 0.587 * img.rgb[3 * i + 1] + 0.114 * img.rgb[3 * i + 2];
    return y;
}

inline std::vector<double> ssim_window() {
    // 11x11 Gaussian, sigma = 1.5, normalized to unit sum.
    std::vector<double> w(11 * 11);
    double sum = 0.0;
    for (int dy = -5; dy <= 5; ++dy)
        for (int dx = -5; dx <= 5; ++dx) {
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5));
            w[static_cast<std::size_t>(dy + 5) * 11 + (dx + 5)] = v;
            sum += v;
        }
    for (double& v : w) v /= sum;
    return w;
}

} // namespace detail

/// Single-scale SSIM on luma: 11x11 Gaussian window (sigma 1.5), K1=0.01,
/// K2=0.03, dynamic range 1.0, averaged over all fully-interior window
/// positions.
inline double ssim(const Image& a, const Image& b) {
    require_same_shape(a, b);
    if (a.width < 11 || a.height < 11)
        throw DimensionError("SSIM requires images at least 11x11, got " +
                             std::to_string(a.width) + "x" + std::to_string(a.height));
    const std::vector<double> ya = detail::luma_plane(a);
    const std::vector<double> yb = detail::luma_plane(b);
    static const std::vector<double> window = detail::ssim_window();
    constexpr double c1 = 0.01 * 0.01; // (K1 * L)^2
    constexpr double c2 = 0.03 * 0.03; // (K2 * L)^2

    double total = 0.0;
    std::size_t count = 0;
    for (int y0 = 0; y0 + 11 <= a.height; ++y0) {
        for (int x0 = 0; x0 + 11 <= a.width; ++x0) {
            double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
            for (int dy = 0; dy < 11; ++dy) {
                const std::size_t row = static_cast<std::size_t>(y0 + dy) * a.width + x0;
                const double* wrow = window.data() + static_cast<std::size_t>(dy) * 11;
                for (int dx = 0; dx < 11; ++dx) {
                    const double w = wrow[dx];
                    const double va = ya[row + dx];
                    const double vb = yb[row + dx];
                    mu_a += w * va;
                    mu_b += w * vb;
                    aa += w * va * va;
                    bb += w * vb * vb;
                    ab += w * va * vb;
                }
            }
            const double var_a = aa - mu_a * mu_a;
            const double var_b = bb - mu_b * mu_b;
            const double cov = ab - mu_a * mu_b;
            const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

// --- aggregated reports -----------------------------------------------------------

struct ViewFidelity {
    std::string view;
    double psnr_db = 0.0;
    double ssim = 0.0;
};

struct FidelityReport {
    std::vector<ViewFidelity> views;

    double mean_psnr() const {
        double s = 0.0;
        for (const auto& v : views) s += v.psnr_db;
        return views.empty() ? 0.0 : s / static_cast<double>(views.size());
    }
    double mean_ssim() const {
        double s = 0.0;
        for (const auto& v : views) s += v.ssim;
        return views.empty() ? 0.0 : s / static_cast<double>(views.size());
    }
};

inline FidelityReport fidelity_report(const std::vector<Image>& reference,
                                      const std::vector<Image>& candidate,
                                      const std::vector<std::string>& names = {}) {
    if (reference.size() != candidate.size())
        throw DimensionError("fidelity report needs matching view counts");
    FidelityReport report;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        ViewFidelity vf;
        vf.view = i < names.size() ? names[i] : "view-" + std::to_string(i);
        vf.psnr_db = psnr(reference[i], candidate[i]);
        vf.ssim = ssim(reference[i], candidate[i]);
        report.views.push_back(std::move(vf));
    }
    return report;
}

inline nlohmann::json fidelity_to_json(const FidelityReport& r) {
    nlohmann::json views = nlohmann::json::array();
    for (const auto& v : r.views)
        views.push_back({{"view", v.view}, {"psnr_db", v.psnr_db}, {"ssim", v.ssim}});
    return nlohmann::json{{"schema", "splatmark/fidelity/v1"},
                          {"views", views},
                          {"mean_psnr_db", r.mean_psnr()},
                          {"mean_ssim", r.mean_ssim()}};
}

/// Fixed-precision decimal formatting shared by every CSV emitter so reports
/// are byte-identical across runs and platforms.
inline std::string format_fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

inline std::string fidelity_csv(const FidelityReport& r) {
    std::string out = "# schema: splatmark/fidelity-csv/v1\nview,psnr_db,ssim\n";
    for (const auto& v : r.views)
        out += v.view + "," + format_fixed(v.psnr_db) + "," + format_fixed(v.ssim) + "\n";
    out += "aggregate," + format_fixed(r.mean_psnr()) + "," + format_fixed(r.mean_ssim()) + "\n";
    return out;
}

} // namespace splatmark

#endif // SPLATMARK_METRICS_HPP
