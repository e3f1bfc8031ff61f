// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// Scene container, PLY serialization, SH flattening, and density evaluation.
// PLY fixtures are assembled byte-by-byte so parser errors can be pinned to
// an exact line, field, or vertex.

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "splatmark/gs_model.hpp"

namespace sm = splatmark;

namespace {

void push_f32(sm::Bytes& out, float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

/// Degree-0 header: x,y,z,f_dc_0..2,opacity,scale_0..2,rot_0..3 (14 floats).
std::string degree0_header(std::size_t count, const std::string& extra_property = "") {
    std::string h = "ply\nformat binary_little_endian 1.0\nelement vertex " +
                    std::to_string(count) + "\n";
    for (const char* name : {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2"})
        h += std::string("property float ") + name + "\n";
    if (!extra_property.empty()) h += extra_property + "\n";
    h += "property float opacity\n";
    for (const char* name : {"scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"})
        h += std::string("property float ") + name + "\n";
    h += "end_header\n";
    return h;
}

sm::Bytes degree0_ply(const std::vector<float>& row, const std::string& extra_property = "",
                      float extra_value = 0.0f) {
    const std::string header = degree0_header(1, extra_property);
    sm::Bytes bytes(header.begin(), header.end());
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i == 6 && !extra_property.empty()) push_f32(bytes, extra_value);
        push_f32(bytes, row[i]);
    }
    return bytes;
}

const std::vector<float> kRow = {0.5f, -1.0f, 2.0f,          // center
                                 0.1f, 0.2f,  0.3f,          // dc
                                 0.0f,                       // opacity
                                 -3.5f, -3.5f, -3.5f,        // log-scales
                                 1.0f, 0.0f,  0.0f,  0.0f};  // quaternion

} // namespace

TEST(Synth, DeterministicAndWellFormed) {
    const sm::GaussianScene a = sm::synth_scene(9, 64, 3, 1.0);
    const sm::GaussianScene b = sm::synth_scene(9, 64, 3, 1.0);
    EXPECT_TRUE(sm::scenes_structurally_equal(a, b));
    EXPECT_FALSE(sm::scenes_structurally_equal(a, sm::synth_scene(10, 64, 3, 1.0)));

    EXPECT_EQ(a.size(), 64u);
    EXPECT_EQ(a.sh_degree, 3);
    EXPECT_EQ(a.flat_sh_length(), 64u * 48u);
    EXPECT_NE(a.provenance.find("seed=9"), std::string::npos);
    for (const auto& g : a.gaussians) {
        EXPECT_NEAR(g.rotation.norm(), 1.0, 1e-12);
        EXPECT_GE(sm::sigmoid(g.opacity), 0.2 - 1e-9);
        EXPECT_LE(sm::sigmoid(g.opacity), 0.95 + 1e-9);
        for (int a3 = 0; a3 < 3; ++a3) {
            EXPECT_GE(g.scale[a3], -4.5);
            EXPECT_LE(g.scale[a3], -3.0);
        }
    }
    EXPECT_THROW(sm::synth_scene(0, 8, 4, 1.0), sm::ConfigError);
}

TEST(Ply, SaveLoadSaveIsByteIdentical) {
    for (int degree : {0, 1, 2, 3}) {
        const sm::GaussianScene scene = sm::synth_scene(3, 50, degree, 1.0);
        const sm::Bytes first = sm::save_ply(scene);
        const sm::GaussianScene reloaded = sm::load_ply(first);
        EXPECT_EQ(reloaded.sh_degree, degree);
        EXPECT_EQ(reloaded.size(), scene.size());
        const sm::Bytes second = sm::save_ply(reloaded);
        EXPECT_EQ(first, second) << "degree " << degree;
    }
}

TEST(Ply, RestPropertiesAreChannelMajor) {
    // Degree 1: K = 3 rest coefficients per channel, stored f_rest_{c*3+(k-1)}.
    sm::GaussianScene scene;
    scene.sh_degree = 1;
    sm::Gaussian g;
    g.rotation = Eigen::Vector4d(1, 0, 0, 0);
    g.sh.resize(12);
    // sh[c*4 + k] = 10*c + k so channel/basis placement is visible.
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < 4; ++k) g.sh[static_cast<std::size_t>(c) * 4 + k] = 10.0 * c + k;
    scene.gaussians.push_back(g);

    const sm::Bytes bytes = sm::save_ply(scene);
    const std::string text(bytes.begin(), bytes.end());
    // Header field order is canonical.
    EXPECT_NE(text.find("property float f_dc_2\nproperty float f_rest_0\n"), std::string::npos);
    EXPECT_NE(text.find("property float f_rest_8\nproperty float opacity\n"), std::string::npos);

    const std::size_t body = text.find("end_header\n") + 11;
    auto f32_at = [&](std::size_t field) {
        float v;
        std::memcpy(&v, bytes.data() + body + field * 4, 4);
        return v;
    };
    // Fields: x y z dc0 dc1 dc2 rest0.. — dc_c = sh[c][0], rest_{c*3+(k-1)} = sh[c][k].
    EXPECT_EQ(f32_at(3), 0.0f);
    EXPECT_EQ(f32_at(4), 10.0f);
    EXPECT_EQ(f32_at(5), 20.0f);
    EXPECT_EQ(f32_at(6), 1.0f);   // f_rest_0 = sh[0][1]
    EXPECT_EQ(f32_at(8), 3.0f);   // f_rest_2 = sh[0][3]
    EXPECT_EQ(f32_at(9), 11.0f);  // f_rest_3 = sh[1][1]
    EXPECT_EQ(f32_at(14), 23.0f); // f_rest_8 = sh[2][3]

    const sm::GaussianScene reloaded = sm::load_ply(bytes);
    for (std::size_t i = 0; i < 12; ++i)
        EXPECT_EQ(reloaded.gaussians[0].sh[i], g.sh[i]) << "sh slot " << i;
}

TEST(Ply, HeaderErrorsNameTheOffendingLine) {
    const auto parse_error = [](const std::string& text) -> std::string {
        const sm::Bytes bytes(text.begin(), text.end());
        try {
            sm::load_ply(bytes);
        } catch (const sm::ParseError& e) {
            return e.what();
        }
        return "";
    };
    EXPECT_NE(parse_error("plyx\nrest\n").find("plyx"), std::string::npos);
    EXPECT_NE(parse_error("ply\nformat ascii 1.0\n").find("format ascii 1.0"),
              std::string::npos);
    EXPECT_NE(parse_error("ply\nformat binary_little_endian 1.0\nelement face 3\n")
                  .find("element face 3"),
              std::string::npos);
    EXPECT_NE(parse_error("ply\nformat binary_little_endian 1.0\nelement vertex 1\n"
                          "property double x\n")
                  .find("property double x"),
              std::string::npos);
    EXPECT_NE(parse_error("ply\nformat binary_little_endian 1.0\nproperty float x\n")
                  .find("property before vertex element"),
              std::string::npos);
    // Missing end_header entirely.
    EXPECT_NE(parse_error("ply\nformat binary_little_endian 1.0\nelement vertex 0\n")
                  .find("end_header"),
              std::string::npos);
}

TEST(Ply, MissingFieldNamesTheField) {
    std::string header = "ply\nformat binary_little_endian 1.0\nelement vertex 0\n";
    for (const char* name : {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2", "scale_0", "scale_1",
                             "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"})
        header += std::string("property float ") + name + "\n";
    header += "end_header\n"; // opacity never declared
    const sm::Bytes bytes(header.begin(), header.end());
    try {
        sm::load_ply(bytes);
        FAIL() << "expected SchemaError";
    } catch (const sm::SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find("'opacity'"), std::string::npos);
    }
}

TEST(Ply, InvalidRestCountIsASchemaError) {
    std::string header = "ply\nformat binary_little_endian 1.0\nelement vertex 0\n";
    for (const char* name : {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2"})
        header += std::string("property float ") + name + "\n";
    for (int i = 0; i < 5; ++i) header += "property float f_rest_" + std::to_string(i) + "\n";
    header += "end_header\n";
    const sm::Bytes bytes(header.begin(), header.end());
    EXPECT_THROW(sm::load_ply(bytes), sm::SchemaError);
}

TEST(Ply, BodyErrorsNameTheVertex) {
    // Truncated body.
    sm::Bytes truncated = degree0_ply(kRow);
    truncated.resize(truncated.size() - 4);
    EXPECT_THROW(sm::load_ply(truncated), sm::ParseError);

    // NaN opacity names vertex 0 and the field.
    std::vector<float> nan_row = kRow;
    nan_row[6] = std::nanf("");
    try {
        sm::load_ply(degree0_ply(nan_row));
        FAIL() << "expected DataError";
    } catch (const sm::DataError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("vertex 0"), std::string::npos);
        EXPECT_NE(msg.find("opacity"), std::string::npos);
    }

    // Zero quaternion is rejected, not silently normalized.
    std::vector<float> zero_rot = kRow;
    zero_rot[10] = zero_rot[11] = zero_rot[12] = zero_rot[13] = 0.0f;
    EXPECT_THROW(sm::load_ply(degree0_ply(zero_rot)), sm::DataError);
}

TEST(Ply, UnknownPropertiesAreIgnored) {
    const sm::Bytes bytes = degree0_ply(kRow, "property float nx", 42.0f);
    const sm::GaussianScene scene = sm::load_ply(bytes);
    ASSERT_EQ(scene.size(), 1u);
    EXPECT_EQ(scene.gaussians[0].center[0], 0.5);
    EXPECT_EQ(scene.gaussians[0].opacity, 0.0);
    EXPECT_EQ(scene.gaussians[0].sh[1], static_cast<double>(0.2f));
}

TEST(Ply, QuaternionRenormalizationPolicy) {
    // Unit quaternions survive bit-exact.
    const sm::GaussianScene exact = sm::load_ply(degree0_ply(kRow));
    EXPECT_EQ(exact.gaussians[0].rotation[0], 1.0);

    // Drift beyond 1e-3 renormalizes and warns.
    std::vector<float> scaled = kRow;
    scaled[10] = 2.0f;
    std::vector<std::string> warnings;
    const sm::GaussianScene fixed = sm::load_ply(degree0_ply(scaled), &warnings);
    EXPECT_NEAR(fixed.gaussians[0].rotation.norm(), 1.0, 1e-12);
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("vertex 0"), std::string::npos);
}

TEST(Flatten, RoundTripAndOrder) {
    const sm::GaussianScene scene = sm::synth_scene(4, 6, 2, 1.0);
    const sm::FlatSHVector flat = sm::flatten_sh(scene);
    EXPECT_EQ(flat.values.size(), 6u * 27u);
    EXPECT_EQ(flat.gaussian_count, 6u);
    EXPECT_EQ(flat.sh_degree, 2);

    // Gaussian-major, then channel, then basis.
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t s = 0; s < 27; ++s)
            EXPECT_EQ(flat.values[i * 27 + s], scene.gaussians[i].sh[s]);

    sm::FlatSHVector perturbed = flat;
    for (auto& v : perturbed.values) v += 0.5;
    const sm::GaussianScene back = sm::unflatten_sh(scene, perturbed);
    EXPECT_EQ(back.gaussians[3].sh[7], scene.gaussians[3].sh[7] + 0.5);
    EXPECT_EQ(back.gaussians[3].center, scene.gaussians[3].center);

    sm::FlatSHVector wrong = flat;
    wrong.values.pop_back();
    EXPECT_THROW(sm::unflatten_sh(scene, wrong), sm::DimensionError);
}

TEST(Density, MatchesClosedForm) {
    sm::Gaussian g;
    g.center = sm::Vec3(1, 2, 3);
    g.scale = sm::Vec3(0, 0, 0); // unit covariance
    g.rotation = Eigen::Vector4d(1, 0, 0, 0);
    EXPECT_DOUBLE_EQ(sm::eval_density(g, g.center), 1.0);
    EXPECT_NEAR(sm::eval_density(g, g.center + sm::Vec3(1, 0, 0)), std::exp(-0.5), 1e-12);

    // Anisotropic: sigma_x = e^{-1} so unit offset costs exp(-e^2/2).
    g.scale = sm::Vec3(-1, 0, 0);
    EXPECT_NEAR(sm::eval_density(g, g.center + sm::Vec3(1, 0, 0)),
                std::exp(-0.5 * std::exp(2.0)), 1e-12);

    // Rotation by 90 degrees about z maps the stretched axis onto y.
    g.rotation = Eigen::Vector4d(std::sqrt(0.5), 0, 0, std::sqrt(0.5));
    EXPECT_NEAR(sm::eval_density(g, g.center + sm::Vec3(0, 1, 0)),
                std::exp(-0.5 * std::exp(2.0)), 1e-9);
}

TEST(Covariance, RotationScaleFactorization) {
    sm::Gaussian g;
    g.scale = sm::Vec3(std::log(2.0), std::log(3.0), std::log(4.0));
    g.rotation = Eigen::Vector4d(1, 0, 0, 0);
    const Eigen::Matrix3d cov = g.covariance();
    EXPECT_NEAR(cov(0, 0), 4.0, 1e-12);
    EXPECT_NEAR(cov(1, 1), 9.0, 1e-12);
    EXPECT_NEAR(cov(2, 2), 16.0, 1e-12);
    EXPECT_NEAR(cov(0, 1), 0.0, 1e-12);

    // Quaternions are normalized on use, so scaling one leaves Sigma unchanged.
    sm::Gaussian h = g;
    h.rotation *= 3.0;
    EXPECT_NEAR((h.covariance() - cov).norm(), 0.0, 1e-12);
}

TEST(Bbox, CenterExtentDiagonal) {
    sm::GaussianScene scene;
    scene.sh_degree = 0;
    for (const auto& c : {sm::Vec3(-1, 0, 2), sm::Vec3(3, -2, 4), sm::Vec3(1, 1, 3)}) {
        sm::Gaussian g;
        g.center = c;
        g.rotation = Eigen::Vector4d(1, 0, 0, 0);
        g.sh.resize(3, 0.0);
        scene.gaussians.push_back(g);
    }
    const sm::Bbox box = sm::scene_bbox(scene);
    EXPECT_EQ(box.min, sm::Vec3(-1, -2, 2));
    EXPECT_EQ(box.max, sm::Vec3(3, 1, 4));
    EXPECT_EQ(box.center(), sm::Vec3(1, -0.5, 3));
    EXPECT_NEAR(box.diagonal(), std::sqrt(16.0 + 9.0 + 4.0), 1e-12);
    EXPECT_EQ(sm::scene_bbox(sm::GaussianScene{}).diagonal(), 0.0);
}

TEST(SceneJson, RoundTripPreservesStructure) {
    const sm::GaussianScene scene = sm::synth_scene(11, 5, 1, 2.0);
    const sm::GaussianScene back = sm::scene_from_json(sm::scene_to_json(scene));
    EXPECT_TRUE(sm::scenes_structurally_equal(scene, back));
}

TEST(SavePly, RejectsMismatchedShLength) {
    sm::GaussianScene scene = sm::synth_scene(2, 3, 1, 1.0);
    scene.gaussians[1].sh.resize(5);
    EXPECT_THROW(sm::save_ply(scene), sm::DimensionError);
}
