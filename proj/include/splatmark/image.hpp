// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// RGB image container (float channels in [0,1]) with binary PPM (P6, 8-bit)
// serialization — the bit-exact fixture format — and amplified difference
// images for visual inspection of watermark energy.

#ifndef SPLATMARK_IMAGE_HPP
#define SPLATMARK_IMAGE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "splatmark/error.hpp"

namespace splatmark {

struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> rgb; // row-major, 3 channels per pixel

    Image() = default;
    Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0.0) {
        if (w < 1 || h < 1) throw ConfigError("image dimensions must be at least 1x1");
    }

    double& at(int x, int y, int c) {
        return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    double at(int x, int y, int c) const {
        return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    void clamp() {
        for (double& v : rgb) v = std::clamp(v, 0.0, 1.0);
    }
};

inline void require_same_shape(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height)
        throw DimensionError("image dimensions differ: " + std::to_string(a.width) + "x" +
                             std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                             std::to_string(b.height));
}

/// 8-bit quantization used by the PPM path: round-to-nearest after clamping.
inline std::uint8_t quantize8(double v) {
    const double c = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

inline std::vector<std::uint8_t> encode_ppm(const Image& img) {
    std::string header =
        "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + img.rgb.size());
    for (const double v : img.rgb) out.push_back(quantize8(v));
    return out;
}

inline Image decode_ppm(const std::vector<std::uint8_t>& bytes) {
    // Header: "P6", whitespace/comment-separated width, height, maxval, then
    // a single whitespace byte before the pixel payload.
    std::size_t pos = 0;
    auto skip_space = [&]() {
        while (pos < bytes.size()) {
            const char c = static_cast<char>(bytes[pos]);
            if (c == '#') {
                while (pos < bytes.size() && static_cast<char>(bytes[pos]) != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_token = [&]() -> std::string {
        skip_space();
        std::string tok;
        while (pos < bytes.size()) {
            const char c = static_cast<char>(bytes[pos]);
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '#') break;
            tok.push_back(c);
            ++pos;
        }
        if (tok.empty()) throw ParseError("truncated PPM header");
        return tok;
    };

    if (read_token() != "P6") throw ParseError("not a binary PPM (P6) image");
    const int width = std::stoi(read_token());
    const int height = std::stoi(read_token());
    const int maxval = std::stoi(read_token());
    if (width < 1 || height < 1) throw ParseError("invalid PPM dimensions");
    if (maxval != 255) throw ParseError("unsupported PPM maxval " + std::to_string(maxval));
    ++pos; // the single whitespace after maxval

    const std::size_t need = static_cast<std::size_t>(width) * height * 3;
    if (bytes.size() - pos < need)
        throw ParseError("PPM payload truncated: expected " + std::to_string(need) +
                         " bytes, have " + std::to_string(bytes.size() - pos));
    Image img(width, height);
    for (std::size_t i = 0; i < need; ++i)
        img.rgb[i] = static_cast<double>(bytes[pos + i]) / 255.0;
    return img;
}

inline void save_ppm(const Image& img, const std::string& path) {
    const auto bytes = encode_ppm(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write PPM file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

inline Image load_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open PPM file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_ppm(bytes);
}

/// |a - b| amplified by `gain` (conventionally 10) and clamped, per channel.
inline Image diff_image(const Image& a, const Image& b, double gain = 10.0) {
    require_same_shape(a, b);
    Image out(a.width, a.height);
    for (std::size_t i = 0; i < a.rgb.size(); ++i)
        out.rgb[i] = std::clamp(std::abs(a.rgb[i] - b.rgb[i]) * gain, 0.0, 1.0);
    return out;
}

inline double max_pixel_value(const Image& img) {
    double m = 0.0;
    for (const double v : img.rgb) m = std::max(m, v);
    return m;
}

} // namespace splatmark

#endif // SPLATMARK_IMAGE_HPP
