// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// 3DGS scene model: binary PLY interchange (reference 3DGS field layout),
// deterministic synthetic scenes, Gaussian density evaluation, and the
// canonical flattening of SH parameters that every downstream module shares.

#ifndef SPLATMARK_GS_MODEL_HPP
#define SPLATMARK_GS_MODEL_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "splatmark/error.hpp"
#include "splatmark/rng.hpp"

namespace splatmark {

using Bytes = std::vector<std::uint8_t>;
using Vec3 = Eigen::Vector3d;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline int sh_basis_count(int degree) { return (degree + 1) * (degree + 1); }
inline int sh_coeff_count(int degree) { return 3 * sh_basis_count(degree); }

/// One anisotropic Gaussian. Opacity is stored pre-activation (logit domain)
/// and scales in log domain, matching the reference 3DGS PLY convention;
/// activations are applied at render time only.
struct Gaussian {
    Vec3 center = Vec3::Zero();
    Vec3 scale = Vec3::Zero();               // log-scales
    Eigen::Vector4d rotation{1, 0, 0, 0};    // unit quaternion (w, x, y, z)
    double opacity = 0.0;                    // logit domain
    std::vector<double> sh;                  // [channel][basis], 3*(degree+1)^2

    Eigen::Quaterniond quaternion() const {
        Eigen::Quaterniond q(rotation[0], rotation[1], rotation[2], rotation[3]);
        q.normalize();
        return q;
    }

    /// Sigma = R * diag(exp(scale))^2 * R^T, SPD by construction.
    Eigen::Matrix3d covariance() const {
        const Eigen::Matrix3d r = quaternion().toRotationMatrix();
        const Vec3 s = scale.array().exp();
        return r * s.cwiseProduct(s).asDiagonal() * r.transpose();
    }
};

struct GaussianScene {
    std::vector<Gaussian> gaussians;
    int sh_degree = 0;
    std::string provenance;

    std::size_t size() const { return gaussians.size(); }
    std::size_t flat_sh_length() const { return size() * sh_coeff_count(sh_degree); }
};

/// Canonical 1-D view of all SH parameters: Gaussian-major, then channel,
/// then SH basis index. unflatten(flatten(scene)) restores every coefficient.
struct FlatSHVector {
    std::vector<double> values;
    std::size_t gaussian_count = 0;
    int sh_degree = 0;
};

// --- density -------------------------------------------------------------------

/// exp(-1/2 (x-mu)^T Sigma^-1 (x-mu)), in (0, 1]. Sigma^-1 is applied through
/// the rotation/scale factors directly, no explicit matrix inverse.
inline double eval_density(const Gaussian& g, const Vec3& x) {
    const Eigen::Matrix3d r = g.quaternion().toRotationMatrix();
    const Vec3 local = r.transpose() * (x - g.center);
    double quad = 0.0;
    for (int i = 0; i < 3; ++i) quad += local[i] * local[i] * std::exp(-2.0 * g.scale[i]);
    return std::exp(-0.5 * quad);
}

// --- flatten / unflatten ---------------------------------------------------------

inline FlatSHVector flatten_sh(const GaussianScene& scene) {
    FlatSHVector flat;
    flat.gaussian_count = scene.size();
    flat.sh_degree = scene.sh_degree;
    const int per = sh_coeff_count(scene.sh_degree);
    flat.values.reserve(scene.size() * per);
    for (const auto& g : scene.gaussians) {
        if (static_cast<int>(g.sh.size()) != per)
            throw DimensionError("gaussian SH length " + std::to_string(g.sh.size()) +
                                 " does not match scene degree " + std::to_string(scene.sh_degree));
        flat.values.insert(flat.values.end(), g.sh.begin(), g.sh.end());
    }
    return flat;
}

/// Returns a copy of `scene` with SH fields replaced from `flat`; all other
/// fields are untouched.
inline GaussianScene unflatten_sh(const GaussianScene& scene, const FlatSHVector& flat) {
    const int per = sh_coeff_count(scene.sh_degree);
    if (flat.values.size() != scene.size() * static_cast<std::size_t>(per))
        throw DimensionError("flat SH length " + std::to_string(flat.values.size()) +
                             " does not match scene (expected " +
                             std::to_string(scene.size() * per) + ")");
    GaussianScene out = scene;
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto first = flat.values.begin() + static_cast<std::ptrdiff_t>(i) * per;
        std::copy(first, first + per, out.gaussians[i].sh.begin());
    }
    return out;
}

// --- bounding box ----------------------------------------------------------------

struct Bbox {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();

    Vec3 center() const { return 0.5 * (min + max); }
    Vec3 extent() const { return max - min; }
    double diagonal() const { return extent().norm(); }
};

inline Bbox scene_bbox(const GaussianScene& scene) {
    if (scene.gaussians.empty()) return {};
    Bbox box{scene.gaussians[0].center, scene.gaussians[0].center};
    for (const auto& g : scene.gaussians) {
        box.min = box.min.cwiseMin(g.center);
        box.max = box.max.cwiseMax(g.center);
    }
    return box;
}

// --- PLY ------------------------------------------------------------------------

namespace detail {

inline void put_f32_le(Bytes& out, float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    out.push_back(static_cast<std::uint8_t>(u));
    out.push_back(static_cast<std::uint8_t>(u >> 8));
    out.push_back(static_cast<std::uint8_t>(u >> 16));
    out.push_back(static_cast<std::uint8_t>(u >> 24));
}

inline float get_f32_le(const std::uint8_t* p) {
    const std::uint32_t u = static_cast<std::uint32_t>(p[0]) |
                            static_cast<std::uint32_t>(p[1]) << 8 |
                            static_cast<std::uint32_t>(p[2]) << 16 |
                            static_cast<std::uint32_t>(p[3]) << 24;
    float v;
    std::memcpy(&v, &u, 4);
    return v;
}

inline int degree_from_rest_count(int rest_count) {
    for (int d = 0; d <= 3; ++d)
        if (rest_count == 3 * (sh_basis_count(d) - 1)) return d;
    throw SchemaError("f_rest property count " + std::to_string(rest_count) +
                      " does not correspond to an SH degree in 0..3");
}

inline std::vector<std::string> canonical_property_order(int degree) {
    std::vector<std::string> names = {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2"};
    const int rest = 3 * (sh_basis_count(degree) - 1);
    for (int i = 0; i < rest; ++i) names.push_back("f_rest_" + std::to_string(i));
    names.push_back("opacity");
    for (int i = 0; i < 3; ++i) names.push_back("scale_" + std::to_string(i));
    for (int i = 0; i < 4; ++i) names.push_back("rot_" + std::to_string(i));
    return names;
}

} // namespace detail

/// Parses a binary little-endian 3DGS PLY. Unknown float properties (e.g.
/// normals) are ignored; the reference field set is required. Quaternions are
/// left bit-exact when already unit to 1e-6 and renormalized otherwise;
/// renormalization drift beyond 1e-3 is reported as a warning, not an error.
inline GaussianScene load_ply(const Bytes& bytes, std::vector<std::string>* warnings = nullptr) {
    std::size_t pos = 0;
    auto read_line = [&]() -> std::string {
        std::string line;
        while (pos < bytes.size()) {
            const char c = static_cast<char>(bytes[pos++]);
            if (c == '\n') return line;
            line.push_back(c);
        }
        throw ParseError("unexpected end of header (missing end_header)");
    };

    std::string line = read_line();
    if (line != "ply") throw ParseError("not a PLY file, first line: '" + line + "'");
    line = read_line();
    if (line != "format binary_little_endian 1.0")
        throw ParseError("unsupported PLY format line: '" + line + "'");

    std::size_t vertex_count = 0;
    bool saw_vertex_element = false;
    std::vector<std::string> property_names;
    while (true) {
        line = read_line();
        if (line == "end_header") break;
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        if (word == "comment") continue;
        if (word == "element") {
            std::string name;
            long long count = -1;
            ss >> name >> count;
            if (name != "vertex" || count < 0)
                throw ParseError("unsupported element line: '" + line + "'");
            if (saw_vertex_element) throw ParseError("duplicate vertex element: '" + line + "'");
            saw_vertex_element = true;
            vertex_count = static_cast<std::size_t>(count);
            continue;
        }
        if (word == "property") {
            std::string type, name;
            ss >> type >> name;
            if (!saw_vertex_element)
                throw ParseError("property before vertex element: '" + line + "'");
            if (type != "float" || name.empty())
                throw ParseError("unsupported property line: '" + line + "'");
            property_names.push_back(name);
            continue;
        }
        throw ParseError("unrecognized header line: '" + line + "'");
    }
    if (!saw_vertex_element) throw ParseError("header missing vertex element");

    std::size_t rest_count = 0;
    for (const auto& n : property_names)
        if (n.rfind("f_rest_", 0) == 0) ++rest_count;
    const int degree = detail::degree_from_rest_count(static_cast<int>(rest_count));

    auto offset_of = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(property_names.begin(), property_names.end(), name);
        if (it == property_names.end())
            throw SchemaError("PLY missing required field '" + name + "'");
        return static_cast<std::size_t>(it - property_names.begin());
    };

    const auto required = detail::canonical_property_order(degree);
    std::vector<std::size_t> offsets;
    offsets.reserve(required.size());
    for (const auto& name : required) offsets.push_back(offset_of(name));

    const std::size_t stride = property_names.size() * 4;
    if (bytes.size() - pos < vertex_count * stride)
        throw ParseError("PLY body truncated: expected " +
                         std::to_string(vertex_count * stride) + " bytes, have " +
                         std::to_string(bytes.size() - pos));

    const int basis = sh_basis_count(degree);
    const int rest_per_channel = basis - 1;
    GaussianScene scene;
    scene.sh_degree = degree;
    scene.gaussians.resize(vertex_count);

    for (std::size_t i = 0; i < vertex_count; ++i) {
        const std::uint8_t* row = bytes.data() + pos + i * stride;
        auto field = [&](std::size_t slot) -> double {
            const double v = detail::get_f32_le(row + offsets[slot] * 4);
            if (!std::isfinite(v))
                throw DataError("non-finite value in vertex " + std::to_string(i) + ", field '" +
                                required[slot] + "'");
            return v;
        };

        Gaussian& g = scene.gaussians[i];
        std::size_t slot = 0;
        for (int a = 0; a < 3; ++a) g.center[a] = field(slot++);
        g.sh.resize(static_cast<std::size_t>(3) * basis);
        for (int c = 0; c < 3; ++c) g.sh[static_cast<std::size_t>(c) * basis] = field(slot++);
        for (int c = 0; c < 3; ++c)
            for (int k = 1; k < basis; ++k)
                g.sh[static_cast<std::size_t>(c) * basis + k] =
                    field(slot + static_cast<std::size_t>(c) * rest_per_channel + (k - 1));
        slot += static_cast<std::size_t>(3) * rest_per_channel;
        g.opacity = field(slot++);
        for (int a = 0; a < 3; ++a) g.scale[a] = field(slot++);
        for (int a = 0; a < 4; ++a) g.rotation[a] = field(slot++);

        const double norm = g.rotation.norm();
        if (norm == 0.0)
            throw DataError("zero quaternion in vertex " + std::to_string(i));
        const double drift = std::abs(norm - 1.0);
        if (drift > 1e-6) {
            if (drift > 1e-3 && warnings)
                warnings->push_back("vertex " + std::to_string(i) +
                                    ": quaternion renormalization drift " + std::to_string(drift));
            g.rotation /= norm;
        }
    }
    return scene;
}

/// Serializes to the canonical binary PLY layout (exact reference field order,
/// float32 little-endian). Deterministic: identical scenes produce identical
/// bytes, and load_ply(save_ply(s)) structurally equals s.
inline Bytes save_ply(const GaussianScene& scene) {
    const int basis = sh_basis_count(scene.sh_degree);

    std::string header = "ply\nformat binary_little_endian 1.0\nelement vertex " +
                         std::to_string(scene.size()) + "\n";
    for (const auto& name : detail::canonical_property_order(scene.sh_degree))
        header += "property float " + name + "\n";
    header += "end_header\n";

    Bytes out(header.begin(), header.end());
    const std::size_t per_vertex = detail::canonical_property_order(scene.sh_degree).size();
    out.reserve(out.size() + scene.size() * per_vertex * 4);

    for (const auto& g : scene.gaussians) {
        if (static_cast<int>(g.sh.size()) != 3 * basis)
            throw DimensionError("gaussian SH length does not match scene degree");
        for (int a = 0; a < 3; ++a) detail::put_f32_le(out, static_cast<float>(g.center[a]));
        for (int c = 0; c < 3; ++c)
            detail::put_f32_le(out, static_cast<float>(g.sh[static_cast<std::size_t>(c) * basis]));
        for (int c = 0; c < 3; ++c)
            for (int k = 1; k < basis; ++k)
                detail::put_f32_le(
                    out, static_cast<float>(g.sh[static_cast<std::size_t>(c) * basis + k]));
        detail::put_f32_le(out, static_cast<float>(g.opacity));
        for (int a = 0; a < 3; ++a) detail::put_f32_le(out, static_cast<float>(g.scale[a]));
        for (int a = 0; a < 4; ++a) detail::put_f32_le(out, static_cast<float>(g.rotation[a]));
    }
    return out;
}

inline GaussianScene load_ply_file(const std::string& path,
                                   std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open PLY file: " + path);
    Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_ply(bytes, warnings);
}

inline void save_ply_file(const GaussianScene& scene, const std::string& path) {
    const Bytes bytes = save_ply(scene);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write PLY file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

// --- synthetic scenes --------------------------------------------------------------

/// Deterministic pseudo-random scene: centers uniform in [-extent, extent]^3,
/// log-scales in a fixed band, random unit quaternions, activated opacities in
/// [0.2, 0.95], SH DC terms in [0, 1] and higher-order terms small. Stands in
/// for trained captures in tests and sweeps.
inline GaussianScene synth_scene(std::uint64_t seed, std::size_t n, int degree, double extent) {
    if (degree < 0 || degree > 3) throw ConfigError("SH degree must be in 0..3");
    GaussianScene scene;
    scene.sh_degree = degree;
    scene.provenance = "synth(seed=" + std::to_string(seed) + ",n=" + std::to_string(n) +
                       ",degree=" + std::to_string(degree) + ",extent=" + std::to_string(extent) +
                       ")";
    scene.gaussians.resize(n);
    Rng rng(seed);
    const int basis = sh_basis_count(degree);
    for (auto& g : scene.gaussians) {
        for (int a = 0; a < 3; ++a) g.center[a] = rng.uniform(-extent, extent);
        for (int a = 0; a < 3; ++a) g.scale[a] = rng.uniform(-4.5, -3.0);
        for (int a = 0; a < 4; ++a) g.rotation[a] = rng.normal();
        if (g.rotation.norm() < 1e-12) g.rotation = Eigen::Vector4d(1, 0, 0, 0);
        g.rotation.normalize();
        g.opacity = logit(rng.uniform(0.2, 0.95));
        g.sh.resize(static_cast<std::size_t>(3) * basis);
        for (int c = 0; c < 3; ++c)
            for (int k = 0; k < basis; ++k)
                g.sh[static_cast<std::size_t>(c) * basis + k] =
                    k == 0 ? rng.uniform(0.0, 1.0) : rng.uniform(-0.05, 0.05);
    }
    return scene;
}

// --- self-describing JSON container (test fixtures) ---------------------------------

inline nlohmann::json scene_to_json(const GaussianScene& scene) {
    nlohmann::json j;
    j["sh_degree"] = scene.sh_degree;
    j["provenance"] = scene.provenance;
    auto& arr = j["gaussians"] = nlohmann::json::array();
    for (const auto& g : scene.gaussians) {
        arr.push_back({{"center", {g.center[0], g.center[1], g.center[2]}},
                       {"scale", {g.scale[0], g.scale[1], g.scale[2]}},
                       {"rotation", {g.rotation[0], g.rotation[1], g.rotation[2], g.rotation[3]}},
                       {"opacity", g.opacity},
                       {"sh", g.sh}});
    }
    return j;
}

inline GaussianScene scene_from_json(const nlohmann::json& j) {
    GaussianScene scene;
    scene.sh_degree = j.at("sh_degree").get<int>();
    scene.provenance = j.value("provenance", "");
    for (const auto& e : j.at("gaussians")) {
        Gaussian g;
        for (int a = 0; a < 3; ++a) g.center[a] = e.at("center").at(a).get<double>();
        for (int a = 0; a < 3; ++a) g.scale[a] = e.at("scale").at(a).get<double>();
        for (int a = 0; a < 4; ++a) g.rotation[a] = e.at("rotation").at(a).get<double>();
        g.opacity = e.at("opacity").get<double>();
        g.sh = e.at("sh").get<std::vector<double>>();
        if (static_cast<int>(g.sh.size()) != sh_coeff_count(scene.sh_degree))
            throw DimensionError("scene JSON gaussian SH length mismatch");
        scene.gaussians.push_back(std::move(g));
    }
    return scene;
}

// --- comparisons (shared by tests and the portal digest) ----------------------------

inline bool scenes_structurally_equal(const GaussianScene& a, const GaussianScene& b) {
    if (a.sh_degree != b.sh_degree || a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& ga = a.gaussians[i];
        const auto& gb = b.gaussians[i];
        if (ga.center != gb.center || ga.scale != gb.scale || ga.rotation != gb.rotation ||
            ga.opacity != gb.opacity || ga.sh != gb.sh)
            return false;
    }
    return true;
}

} // namespace splatmark

#endif // SPLATMARK_GS_MODEL_HPP
