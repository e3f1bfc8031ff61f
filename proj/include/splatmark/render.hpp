// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// Reference CPU splatting renderer: pinhole projection with local affine
// Jacobian, global front-to-back depth ordering, and alpha compositing with
// transmittance early-out. Deterministic by construction.

#ifndef SPLATMARK_RENDER_HPP
#define SPLATMARK_RENDER_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "splatmark/error.hpp"
#include "splatmark/gs_model.hpp"
#include "splatmark/image.hpp"

namespace splatmark {

/// Camera model: +z looks forward, +y points down the image, pixel (0,0) is
/// the top-left corner and pixel centers sit at half-integer coordinates.
/// `orientation` rotates camera axes into world space (columns: right, down,
/// forward).
struct Camera {
    Vec3 position = Vec3::Zero();
    Eigen::Vector4d orientation{1, 0, 0, 0}; // unit quaternion (w, x, y, z)
    double focal = 300.0;                    // pixels
    int width = 256;
    int height = 256;
    double near = 0.1;
    double far = 100.0;

    Eigen::Matrix3d rotation() const {
        Eigen::Quaterniond q(orientation[0], orientation[1], orientation[2], orientation[3]);
        q.normalize();
        return q.toRotationMatrix();
    }
};

inline void validate_camera(const Camera& cam) {
    if (cam.width < 1 || cam.height < 1) throw ConfigError("camera resolution must be >= 1x1");
    if (!(cam.near > 0.0 && cam.near < cam.far))
        throw ConfigError("camera planes must satisfy 0 < near < far");
    if (!(cam.focal > 0.0)) throw ConfigError("camera focal length must be positive");
    if (cam.orientation.norm() < 1e-9) throw ConfigError("camera orientation is degenerate");
}

/// Builds a camera at `position` looking at `target`, with `up` fixing roll.
inline Camera look_at(const Vec3& position, const Vec3& target, const Vec3& up, double focal,
                      int width, int height, double near = 0.1, double far = 100.0) {
    const Vec3 to_target = target - position;
    if (to_target.norm() < 1e-12) throw ConfigError("camera position coincides with target");
    const Vec3 forward = to_target.normalized();
    Vec3 right = forward.cross(up);
    if (right.norm() < 1e-9)
        throw ConfigError("camera up direction is parallel to the view direction");
    right.normalize();
    const Vec3 down = forward.cross(right); // anti-aligned with `up`, proper rotation

    Eigen::Matrix3d r;
    r.col(0) = right;
    r.col(1) = down;
    r.col(2) = forward;
    const Eigen::Quaterniond q(r);
    Camera cam;
    cam.position = position;
    cam.orientation = Eigen::Vector4d(q.w(), q.x(), q.y(), q.z());
    if (cam.orientation[0] < 0.0) cam.orientation = -cam.orientation; // canonical sign
    cam.focal = focal;
    cam.width = width;
    cam.height = height;
    cam.near = near;
    cam.far = far;
    validate_camera(cam);
    return cam;
}

/// A Gaussian projected to the image plane.
struct SplatProjection {
    Eigen::Vector2d center2d = Eigen::Vector2d::Zero();
    Eigen::Matrix2d cov2d = Eigen::Matrix2d::Identity();
    double depth = 0.0;
};

/// Projects one Gaussian; nullopt when culled (outside the depth range or the
/// 3-sigma screen footprint misses the image entirely). cov2d carries the
/// 0.3-pixel low-pass dilation and is therefore always invertible.
inline std::optional<SplatProjection> project_gaussian(const Gaussian& g, const Camera& cam) {
    const Eigen::Matrix3d w = cam.rotation().transpose(); // world -> camera
    const Vec3 p = w * (g.center - cam.position);
    const double z = p.z();
    if (z <= cam.near || z > cam.far) return std::nullopt;

    SplatProjection out;
    out.depth = z;
    out.center2d = Eigen::Vector2d(cam.focal * p.x() / z + 0.5 * cam.width,
                                   cam.focal * p.y() / z + 0.5 * cam.height);

    Eigen::Matrix<double, 2, 3> jac;
    jac << cam.focal / z, 0.0, -cam.focal * p.x() / (z * z), //
        0.0, cam.focal / z, -cam.focal * p.y() / (z * z);
    out.cov2d = jac * w * g.covariance() * w.transpose() * jac.transpose();
    out.cov2d += 0.3 * Eigen::Matrix2d::Identity();

    // Largest-eigenvalue bound on the 3-sigma footprint radius.
    const double mid = 0.5 * (out.cov2d(0, 0) + out.cov2d(1, 1));
    const double det = out.cov2d(0, 0) * out.cov2d(1, 1) - out.cov2d(0, 1) * out.cov2d(1, 0);
    const double lambda_max = mid + std::sqrt(std::max(0.0, mid * mid - det));
    const double radius = 3.0 * std::sqrt(lambda_max);
    if (out.center2d.x() + radius < 0.0 || out.center2d.x() - radius > cam.width ||
        out.center2d.y() + radius < 0.0 || out.center2d.y() - radius > cam.height)
        return std::nullopt;
    return out;
}

namespace detail {

// Real SH basis constants and polynomial forms per the reference 3DGS tables.
inline constexpr double kSH0 = 0.28209479177387814;
inline constexpr double kSH1 = 0.4886025119029199;
inline constexpr double kSH2[5] = {1.0925484305920792, -1.0925484305920792,
                                   0.31539156525252005, -1.0925484305920792,
                                   0.5462742152960396};
inline constexpr double kSH3[7] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                                   0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                                   -0.5900435899266435};

} // namespace detail

/// Real SH basis values Y_0..Y_{(degree+1)^2-1} at a unit direction.
inline std::vector<double> sh_basis(int degree, const Vec3& dir) {
    if (degree < 0 || degree > 3) throw ConfigError("SH degree must be in 0..3");
    std::vector<double> y(static_cast<std::size_t>(sh_basis_count(degree)));
    y[0] = detail::kSH0;
    if (degree < 1) return y;
    const double x = dir.x(), yy = dir.y(), z = dir.z();
    y[1] = -detail::kSH1 * yy;
    y[2] = detail::kSH1 * z;
    y[3] = -detail::kSH1 * x;
    if (degree < 2) return y;
    const double xx = x * x, y2 = yy * yy, zz = z * z;
    const double xy = x * yy, yz = yy * z, xz = x * z;
    y[4] = detail::kSH2[0] * xy;
    y[5] = detail::kSH2[1] * yz;
    y[6] = detail::kSH2[2] * (2.0 * zz - xx - y2);
    y[7] = detail::kSH2[3] * xz;
    y[8] = detail::kSH2[4] * (xx - y2);
    if (degree < 3) return y;
    y[9] = detail::kSH3[0] * yy * (3.0 * xx - y2);
    y[10] = detail::kSH3[1] * xy * z;
    y[11] = detail::kSH3[2] * yy * (4.0 * zz - xx - y2);
    y[12] = detail::kSH3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * y2);
    y[13] = detail::kSH3[4] * x * (4.0 * zz - xx - y2);
    y[14] = detail::kSH3[5] * z * (xx - y2);
    y[15] = detail::kSH3[6] * x * (xx - 3.0 * y2);
    return y;
}

/// View-dependent color: 0.5 + sum_k f_k Y_k(dir) per channel, clamped.
inline Vec3 eval_sh_color(const Gaussian& g, const Vec3& view_dir) {
    const int basis = static_cast<int>(g.sh.size()) / 3;
    int degree = 0;
    while (sh_basis_count(degree) < basis && degree < 3) ++degree;
    if (g.sh.size() % 3 != 0 || sh_basis_count(degree) != basis)
        throw DimensionError("gaussian SH length is not 3*(d+1)^2 for any degree in 0..3");
    const std::vector<double> y = sh_basis(degree, view_dir);
    Vec3 color;
    for (int c = 0; c < 3; ++c) {
        double v = 0.5;
        for (int k = 0; k < basis; ++k)
            v += g.sh[static_cast<std::size_t>(c) * basis + k] * y[static_cast<std::size_t>(k)];
        color[c] = std::clamp(v, 0.0, 1.0);
    }
    return color;
}

/// render() output plus per-pixel compositing diagnostics. The identity
/// weight_sum + transmittance == 1 - background share holds by telescoping:
/// each composited splat contributes alpha_i * T_i and multiplies T by
/// (1 - alpha_i), so the accumulated weight is exactly 1 - T_final.
struct RenderDetail {
    Image image;
    std::vector<double> weight_sum;     // per pixel: sum of alpha_i * T_i
    std::vector<double> transmittance;  // per pixel: T after the last splat
};

/// Front-to-back alpha compositing over globally depth-sorted splats (ties by
/// original index). A splat contributes to the pixels inside its 3-sigma
/// screen bounding box; per-splat color is evaluated once per view along the
/// camera-to-center direction. Remaining transmittance is filled with the
/// background color.
inline RenderDetail render_detailed(const GaussianScene& scene, const Camera& cam,
                                    const Vec3& background = Vec3::Zero()) {
    validate_camera(cam);
    struct Entry {
        SplatProjection proj;
        Vec3 color;
        double opacity_act = 0.0;
        Eigen::Matrix2d inv_cov = Eigen::Matrix2d::Identity();
        int x0 = 0, x1 = 0, y0 = 0, y1 = 0; // inclusive pixel bounds
        std::size_t index = 0;
    };
    std::vector<Entry> entries;
    entries.reserve(scene.size());

    for (std::size_t i = 0; i < scene.size(); ++i) {
        const Gaussian& g = scene.gaussians[i];
        const auto proj = project_gaussian(g, cam);
        if (!proj) continue;
        Entry e;
        e.proj = *proj;
        e.index = i;
        const Vec3 to_center = g.center - cam.position;
        e.color = eval_sh_color(g, to_center.norm() > 1e-12 ? Vec3(to_center.normalized())
                                                            : Vec3(0, 0, 1));
        e.opacity_act = sigmoid(g.opacity);
        const double det = e.proj.cov2d(0, 0) * e.proj.cov2d(1, 1) -
                           e.proj.cov2d(0, 1) * e.proj.cov2d(1, 0);
        e.inv_cov << e.proj.cov2d(1, 1) / det, -e.proj.cov2d(0, 1) / det,
            -e.proj.cov2d(1, 0) / det, e.proj.cov2d(0, 0) / det;

        const double mid = 0.5 * (e.proj.cov2d(0, 0) + e.proj.cov2d(1, 1));
        const double lambda_max = mid + std::sqrt(std::max(0.0, mid * mid - det));
        const double radius = 3.0 * std::sqrt(lambda_max);
        e.x0 = std::max(0, static_cast<int>(std::floor(e.proj.center2d.x() - radius)));
        e.x1 = std::min(cam.width - 1, static_cast<int>(std::ceil(e.proj.center2d.x() + radius)));
        e.y0 = std::max(0, static_cast<int>(std::floor(e.proj.center2d.y() - radius)));
        e.y1 = std::min(cam.height - 1, static_cast<int>(std::ceil(e.proj.center2d.y() + radius)));
        if (e.x0 > e.x1 || e.y0 > e.y1) continue;
        entries.push_back(std::move(e));
    }

    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.proj.depth != b.proj.depth) return a.proj.depth < b.proj.depth;
        return a.index < b.index;
    });

    // Depth-ordered splat list per pixel, built by scattering sorted entries.
    std::vector<std::vector<std::uint32_t>> buckets(
        static_cast<std::size_t>(cam.width) * cam.height);
    for (std::size_t s = 0; s < entries.size(); ++s) {
        const Entry& e = entries[s];
        for (int py = e.y0; py <= e.y1; ++py)
            for (int px = e.x0; px <= e.x1; ++px)
                buckets[static_cast<std::size_t>(py) * cam.width + px].push_back(
                    static_cast<std::uint32_t>(s));
    }

    RenderDetail out;
    out.image = Image(cam.width, cam.height);
    const std::size_t pixels = static_cast<std::size_t>(cam.width) * cam.height;
    out.weight_sum.assign(pixels, 0.0);
    out.transmittance.assign(pixels, 1.0);
    for (int py = 0; py < cam.height; ++py) {
        for (int px = 0; px < cam.width; ++px) {
            const std::size_t pix = static_cast<std::size_t>(py) * cam.width + px;
            const auto& list = buckets[pix];
            const double sx = px + 0.5, sy = py + 0.5;
            double transmittance = 1.0;
            double weight_sum = 0.0;
            double r = 0.0, g = 0.0, b = 0.0;
            for (const std::uint32_t s : list) {
                const Entry& e = entries[s];
                const double dx = sx - e.proj.center2d.x();
                const double dy = sy - e.proj.center2d.y();
                const double quad = e.inv_cov(0, 0) * dx * dx +
                                    (e.inv_cov(0, 1) + e.inv_cov(1, 0)) * dx * dy +
                                    e.inv_cov(1, 1) * dy * dy;
                const double alpha =
                    std::min(0.99, e.opacity_act * std::exp(-0.5 * quad));
                const double w = alpha * transmittance;
                r += e.color[0] * w;
                g += e.color[1] * w;
                b += e.color[2] * w;
                weight_sum += w;
                transmittance *= 1.0 - alpha;
                if (transmittance < 1e-4) break;
            }
            out.image.at(px, py, 0) = std::clamp(r + background[0] * transmittance, 0.0, 1.0);
            out.image.at(px, py, 1) = std::clamp(g + background[1] * transmittance, 0.0, 1.0);
            out.image.at(px, py, 2) = std::clamp(b + background[2] * transmittance, 0.0, 1.0);
            out.weight_sum[pix] = weight_sum;
            out.transmittance[pix] = transmittance;
        }
    }
    return out;
}

/// Convenience wrapper returning only the composited image.
inline Image render(const GaussianScene& scene, const Camera& cam,
                    const Vec3& background = Vec3::Zero()) {
    return render_detailed(scene, cam, background).image;
}

// --- camera serialization (CLI / portal challenge exchange) ------------------------

inline nlohmann::json camera_to_json(const Camera& cam) {
    return nlohmann::json{
        {"position", {cam.position[0], cam.position[1], cam.position[2]}},
        {"orientation",
         {cam.orientation[0], cam.orientation[1], cam.orientation[2], cam.orientation[3]}},
        {"focal", cam.focal},
        {"width", cam.width},
        {"height", cam.height},
        {"near", cam.near},
        {"far", cam.far}};
}

inline Camera camera_from_json(const nlohmann::json& j) {
    Camera cam;
    for (int a = 0; a < 3; ++a) cam.position[a] = j.at("position").at(a).get<double>();
    for (int a = 0; a < 4; ++a) cam.orientation[a] = j.at("orientation").at(a).get<double>();
    cam.focal = j.at("focal").get<double>();
    cam.width = j.at("width").get<int>();
    cam.height = j.at("height").get<int>();
    cam.near = j.value("near", cam.near);
    cam.far = j.value("far", cam.far);
    validate_camera(cam);
    return cam;
}

} // namespace splatmark

#endif // SPLATMARK_RENDER_HPP
