// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// DCT kernels against a naive O(L^2) oracle, round-trip and Parseval bounds,
// and the carrier-pool index arithmetic (including the FP-snap cases).

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "splatmark/keying.hpp"
#include "splatmark/rng.hpp"
#include "splatmark/transform.hpp"

namespace sm = splatmark;

namespace {

/// Textbook orthonormal DCT-II, evaluated term by term.
std::vector<double> naive_dct(const std::vector<double>& x) {
    const std::size_t L = x.size();
    std::vector<double> out(L);
    for (std::size_t k = 0; k < L; ++k) {
        const double s = k == 0 ? std::sqrt(1.0 / static_cast<double>(L))
                                : std::sqrt(2.0 / static_cast<double>(L));
        double acc = 0.0;
        for (std::size_t n = 0; n < L; ++n)
            acc += x[n] * std::cos(M_PI * (2.0 * static_cast<double>(n) + 1.0) *
                                   static_cast<double>(k) / (2.0 * static_cast<double>(L)));
        out[k] = s * acc;
    }
    return out;
}

std::vector<double> random_signal(std::size_t L, std::uint64_t seed) {
    sm::Rng rng(seed);
    std::vector<double> x(L);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    return x;
}

double l2(const std::vector<double>& v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

} // namespace

TEST(Dct, MatchesFrozenGolden) {
    const std::vector<double> X = sm::dct({1.0, 2.0, 3.0, 4.0});
    ASSERT_EQ(X.size(), 4u);
    EXPECT_NEAR(X[0], 5.0, 1e-12);
    EXPECT_NEAR(X[1], -2.230442497387663, 1e-12);
    EXPECT_NEAR(X[2], 0.0, 1e-12);
    EXPECT_NEAR(X[3], -0.15851266778110815, 1e-12);
}

TEST(Dct, MatchesNaiveOracleUpTo4096) {
    for (const std::size_t L : {1u, 2u, 3u, 5u, 16u, 17u, 100u, 768u, 4096u}) {
        const std::vector<double> x = random_signal(L, 1000 + L);
        const std::vector<double> fast = sm::dct(x);
        const std::vector<double> slow = naive_dct(x);
        double worst = 0.0;
        for (std::size_t k = 0; k < L; ++k) worst = std::max(worst, std::abs(fast[k] - slow[k]));
        EXPECT_LT(worst, 1e-8) << "L=" << L;
    }
}

TEST(Dct, RoundTripUpToTwoPow20) {
    for (const std::size_t L : {4u, 1000u, 49152u, 196608u, 1u << 20}) {
        const std::vector<double> x = random_signal(L, 7);
        const std::vector<double> back = sm::idct(sm::dct(x));
        double err = 0.0;
        for (std::size_t i = 0; i < L; ++i) err = std::max(err, std::abs(back[i] - x[i]));
        EXPECT_LT(err / std::max(1.0, l2(x)), 1e-9) << "L=" << L;
    }
}

TEST(Dct, ParsevalAndLinearity) {
    const std::vector<double> x = random_signal(4096, 21);
    const std::vector<double> y = random_signal(4096, 22);
    const std::vector<double> X = sm::dct(x);
    EXPECT_NEAR(l2(X), l2(x), 1e-9 * l2(x));

    std::vector<double> sum(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sum[i] = x[i] + 2.0 * y[i];
    const std::vector<double> S = sm::dct(sum);
    const std::vector<double> Y = sm::dct(y);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        worst = std::max(worst, std::abs(S[i] - (X[i] + 2.0 * Y[i])));
    EXPECT_LT(worst, 1e-10);
}

TEST(Dct, EmptyAndConstantSignals) {
    EXPECT_TRUE(sm::dct({}).empty());
    EXPECT_TRUE(sm::idct({}).empty());

    // DCT of a constant c over L samples is (c*sqrt(L), 0, ..., 0).
    const std::vector<double> X = sm::dct(std::vector<double>(9, 2.0));
    EXPECT_NEAR(X[0], 6.0, 1e-12);
    for (std::size_t k = 1; k < 9; ++k) EXPECT_NEAR(X[k], 0.0, 1e-12);
}

TEST(Band, Validation) {
    EXPECT_NO_THROW(sm::validate_band({0.0, 1.0}));
    EXPECT_THROW(sm::validate_band({-0.1, 0.5}), sm::ConfigError);
    EXPECT_THROW(sm::validate_band({0.5, 0.5}), sm::ConfigError);
    EXPECT_THROW(sm::validate_band({0.6, 0.4}), sm::ConfigError);
    EXPECT_THROW(sm::validate_band({0.2, 1.1}), sm::ConfigError);
}

TEST(CarrierPool, IndexArithmeticGoldens) {
    // Reference geometry: L = 4096 * 48 with the default band.
    const sm::CarrierPool big = sm::make_carrier_pool(196608, sm::Band{0.10, 0.18});
    EXPECT_EQ(big.first, 19661u);
    EXPECT_EQ(big.size, 15728u);

    // 0.18 * 100 lands on 17.999999999999996 without the snap.
    const sm::CarrierPool small = sm::make_carrier_pool(100, sm::Band{0.10, 0.18});
    EXPECT_EQ(small.first, 10u);
    EXPECT_EQ(small.size, 8u);

    const sm::CarrierPool full = sm::make_carrier_pool(4, sm::Band{0.0, 1.0});
    EXPECT_EQ(full.first, 0u);
    EXPECT_EQ(full.size, 4u);

    // A band narrower than one coefficient yields an empty pool.
    const sm::CarrierPool empty = sm::make_carrier_pool(10, sm::Band{0.11, 0.19});
    EXPECT_EQ(empty.size, 0u);

    EXPECT_EQ(big.index(0), 19661u);
    EXPECT_EQ(big.index(15727u), 35388u);
    EXPECT_THROW(big.index(15728u), sm::DimensionError);
}

TEST(CarrierPool, ReadWriteThroughKeyedOrder) {
    std::vector<double> spectrum(100, 0.0);
    for (std::size_t i = 0; i < 100; ++i) spectrum[i] = static_cast<double>(i);
    const sm::CarrierPool pool = sm::make_carrier_pool(100, sm::Band{0.10, 0.18});

    const std::vector<std::uint32_t> order = {2, 6, 3, 1, 5, 7, 4, 0};
    const std::vector<double> vals = sm::read_carriers(spectrum, pool, order);
    ASSERT_EQ(vals.size(), 8u);
    EXPECT_EQ(vals[0], 12.0); // first + order[0] = 10 + 2
    EXPECT_EQ(vals[7], 10.0);

    std::vector<double> target(100, 0.0);
    sm::write_carriers(target, pool, order, vals);
    for (std::size_t i = 10; i <= 17; ++i) EXPECT_EQ(target[i], static_cast<double>(i));
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(target[i], 0.0);
    EXPECT_EQ(target[18], 0.0);

    // A permutation prefix reads only that subset.
    const std::vector<std::uint32_t> prefix = {2, 6};
    EXPECT_EQ(sm::read_carriers(spectrum, pool, prefix), (std::vector<double>{12.0, 16.0}));

    EXPECT_THROW(sm::read_carriers(std::vector<double>(99), pool, order), sm::DimensionError);
    std::vector<double> wrong(100);
    EXPECT_THROW(sm::write_carriers(wrong, pool, order, std::vector<double>(7)),
                 sm::DimensionError);
}

TEST(CarrierPool, WatermarkSurvivesTransformRoundTrip) {
    // Scatter +/-1 amplitudes, inverse transform, forward transform, gather:
    // recovered values match what was written to 1e-10.
    const std::size_t L = 1000;
    const std::vector<double> x = random_signal(L, 33);
    std::vector<double> spectrum = sm::dct(x);
    const sm::CarrierPool pool = sm::make_carrier_pool(L, sm::Band{});
    ASSERT_GT(pool.size, 20u);

    std::vector<std::uint32_t> order(pool.size);
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = static_cast<std::uint32_t>(order.size() - 1 - i);
    std::vector<double> marked = sm::read_carriers(spectrum, pool, order);
    for (std::size_t t = 0; t < marked.size(); ++t) marked[t] += (t % 2 == 0 ? 0.01 : -0.01);
    sm::write_carriers(spectrum, pool, order, marked);

    const std::vector<double> reread =
        sm::read_carriers(sm::dct(sm::idct(spectrum)), pool, order);
    for (std::size_t t = 0; t < reread.size(); ++t)
        EXPECT_NEAR(reread[t], marked[t], 1e-10);
}
