// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0

#ifndef SPLATMARK_RNG_HPP
#define SPLATMARK_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace splatmark {

/// Deterministic RNG for scene synthesis and attack noise. std::mt19937_64 is
/// bit-exact everywhere; the variate transforms below are hand-rolled because
/// std::uniform_real_distribution / std::normal_distribution are
/// implementation-defined and would break cross-platform reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller. Pairs are generated eagerly so the
    /// draw sequence depends only on the call count.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        // Guard log(0); smallest representable draw keeps the tail finite.
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Uniform integer in [0, n) via rejection (no modulo bias).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace splatmark

#endif // SPLATMARK_RNG_HPP
