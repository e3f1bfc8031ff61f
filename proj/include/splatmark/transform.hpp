// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// Orthonormal 1-D DCT over the flattened SH vector (FFTW-backed) and the
// mid-band carrier pool: the contiguous range of spectrum coefficients that
// watermark energy is allowed to touch, addressed through keyed slot orders.

#ifndef SPLATMARK_TRANSFORM_HPP
#define SPLATMARK_TRANSFORM_HPP

#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "splatmark/error.hpp"

namespace splatmark {

namespace detail {

/// FFTW plan creation/destruction is not thread-safe; execution is.
inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

/// Collapses values that differ from an integer only by accumulated FP noise
/// (e.g. 0.18 * 100 = 17.999999999999993) onto that integer.
inline double snap_near_integer(double x) {
    const double r = std::round(x);
    return (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) ? r : x;
}

} // namespace detail

/// Orthonormal DCT-II. Output k is sum_n x_n * s_k * cos(pi*(n+1/2)*k/L) with
/// s_0 = sqrt(1/L) and s_k = sqrt(2/L) otherwise, so the transform preserves
/// the l2 norm and idct() inverts it exactly up to rounding.
inline std::vector<double> dct(const std::vector<double>& x) {
    const std::size_t L = x.size();
    if (L == 0) return {};
    std::vector<double> in(x);
    std::vector<double> out(L);
    {
        std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
        fftw_plan plan = fftw_plan_r2r_1d(static_cast<int>(L), in.data(), out.data(),
                                          FFTW_REDFT10, FFTW_ESTIMATE);
        if (!plan) throw DataError("FFTW failed to plan DCT of length " + std::to_string(L));
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    const double s0 = std::sqrt(1.0 / static_cast<double>(L)) * 0.5;
    const double sk = std::sqrt(2.0 / static_cast<double>(L)) * 0.5;
    out[0] *= s0;
    for (std::size_t k = 1; k < L; ++k) out[k] *= sk;
    return out;
}

/// Orthonormal DCT-III, the exact inverse of dct().
inline std::vector<double> idct(const std::vector<double>& X) {
    const std::size_t L = X.size();
    if (L == 0) return {};
    std::vector<double> in(L);
    in[0] = X[0] * std::sqrt(1.0 / static_cast<double>(L));
    const double inv = 1.0 / std::sqrt(2.0 * static_cast<double>(L));
    for (std::size_t k = 1; k < L; ++k) in[k] = X[k] * inv;
    std::vector<double> out(L);
    {
        std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
        fftw_plan plan = fftw_plan_r2r_1d(static_cast<int>(L), in.data(), out.data(),
                                          FFTW_REDFT01, FFTW_ESTIMATE);
        if (!plan) throw DataError("FFTW failed to plan IDCT of length " + std::to_string(L));
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    return out;
}

// --- carrier pool ----------------------------------------------------------------

/// Normalized frequency band [lo, hi), as fractions of the spectrum length.
struct Band {
    double lo = 0.10;
    double hi = 0.18;
};

inline void validate_band(const Band& band) {
    if (!(band.lo >= 0.0 && band.lo < band.hi && band.hi <= 1.0))
        throw ConfigError("band must satisfy 0 <= lo < hi <= 1, got [" +
                          std::to_string(band.lo) + ", " + std::to_string(band.hi) + ")");
}

/// The in-band coefficient indices [first, first + size). Carrier slots are
/// keyed positions within the pool: slot t of an order `ord` addresses
/// absolute spectrum coefficient first + ord[t].
struct CarrierPool {
    std::size_t length = 0; // spectrum length L
    std::size_t first = 0;  // ceil(lo * L) after FP snap
    std::size_t size = 0;   // T

    std::size_t index(std::size_t offset) const {
        if (offset >= size)
            throw DimensionError("carrier offset " + std::to_string(offset) +
                                 " out of pool of size " + std::to_string(size));
        return first + offset;
    }
};

inline CarrierPool make_carrier_pool(std::size_t length, const Band& band) {
    validate_band(band);
    const double lo_x = detail::snap_near_integer(band.lo * static_cast<double>(length));
    const double hi_x = detail::snap_near_integer(band.hi * static_cast<double>(length));
    const long long lo_idx = static_cast<long long>(std::ceil(lo_x));
    const long long hi_idx = static_cast<long long>(std::floor(hi_x)) - 1;
    CarrierPool pool;
    pool.length = length;
    pool.first = static_cast<std::size_t>(lo_idx);
    pool.size = hi_idx >= lo_idx ? static_cast<std::size_t>(hi_idx - lo_idx + 1) : 0;
    return pool;
}

/// Gathers spectrum values at pool slots addressed through `order` (a keyed
/// permutation or its prefix); out[t] = spectrum[first + order[t]].
inline std::vector<double> read_carriers(const std::vector<double>& spectrum,
                                         const CarrierPool& pool,
                                         const std::vector<std::uint32_t>& order) {
    if (spectrum.size() != pool.length)
        throw DimensionError("spectrum length " + std::to_string(spectrum.size()) +
                             " does not match carrier pool length " +
                             std::to_string(pool.length));
    std::vector<double> out(order.size());
    for (std::size_t t = 0; t < order.size(); ++t) out[t] = spectrum[pool.index(order[t])];
    return out;
}

/// Scatter inverse of read_carriers: spectrum[first + order[t]] = values[t].
inline void write_carriers(std::vector<double>& spectrum, const CarrierPool& pool,
                           const std::vector<std::uint32_t>& order,
                           const std::vector<double>& values) {
    if (spectrum.size() != pool.length)
        throw DimensionError("spectrum length " + std::to_string(spectrum.size()) +
                             " does not match carrier pool length " +
                             std::to_string(pool.length));
    if (values.size() != order.size())
        throw DimensionError("carrier value count " + std::to_string(values.size()) +
                             " does not match order length " + std::to_string(order.size()));
    for (std::size_t t = 0; t < order.size(); ++t) spectrum[pool.index(order[t])] = values[t];
}

} // namespace splatmark

#endif // SPLATMARK_TRANSFORM_HPP
