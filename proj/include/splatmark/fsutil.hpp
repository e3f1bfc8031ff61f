// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// Small filesystem helpers shared by the portal, the sweep harness and the
// CLI: whole-file reads and atomic (temp + rename) writes.

#ifndef SPLATMARK_FSUTIL_HPP
#define SPLATMARK_FSUTIL_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "splatmark/error.hpp"

namespace splatmark {

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
}

inline std::string read_file_text(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    return std::string(bytes.begin(), bytes.end());
}

/// Writes via a sibling temp file and rename, so readers never observe a
/// partially written file.
inline void write_file_atomic(const std::string& path, const void* data, std::size_t size) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write file: " + tmp.string());
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!out) throw IoError("short write to: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
}

inline void write_file_atomic(const std::string& path, const std::string& text) {
    write_file_atomic(path, text.data(), text.size());
}

inline void write_file_atomic(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    write_file_atomic(path, bytes.data(), bytes.size());
}

} // namespace splatmark

#endif // SPLATMARK_FSUTIL_HPP
