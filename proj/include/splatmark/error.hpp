// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0

#ifndef SPLATMARK_ERROR_HPP
#define SPLATMARK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace splatmark {

/// Base class for all splatmark errors. `kind()` is a stable machine-readable
/// tag (the CLI maps it into its JSON error envelope).
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define SPLATMARK_DEFINE_ERROR(Name, tag)                        \
    class Name : public Error {                                  \
    public:                                                      \
        explicit Name(const std::string& msg) : Error(tag, msg) {} \
    }

SPLATMARK_DEFINE_ERROR(ParseError, "parse");
SPLATMARK_DEFINE_ERROR(SchemaError, "schema");
SPLATMARK_DEFINE_ERROR(DataError, "data");
SPLATMARK_DEFINE_ERROR(DimensionError, "dimension");
SPLATMARK_DEFINE_ERROR(ConfigError, "config");
SPLATMARK_DEFINE_ERROR(CapacityError, "capacity");
SPLATMARK_DEFINE_ERROR(AlignmentError, "alignment");
SPLATMARK_DEFINE_ERROR(DegenerateOutputError, "degenerate_output");
SPLATMARK_DEFINE_ERROR(QuotaError, "quota");
SPLATMARK_DEFINE_ERROR(AuthError, "auth");
SPLATMARK_DEFINE_ERROR(NotFoundError, "not_found");
SPLATMARK_DEFINE_ERROR(OutOfModelError, "out_of_model");
SPLATMARK_DEFINE_ERROR(IoError, "io");

#undef SPLATMARK_DEFINE_ERROR

} // namespace splatmark

#endif // SPLATMARK_ERROR_HPP
