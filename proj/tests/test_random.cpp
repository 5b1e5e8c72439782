#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "relq/random.hpp"

using namespace relq;

// Known-answer vectors of the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
    EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}),
              (std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
              (std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
              (std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterRng, SameSeedAndStreamRepeat) {
    CounterRng a(42, 7), b(42, 7);
    for (int k = 0; k < 1000; ++k) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(CounterRng, StreamsAndSeedsDiffer) {
    CounterRng a(42, 7), b(42, 8), c(43, 7);
    int same_b = 0, same_c = 0;
    for (int k = 0; k < 1000; ++k) {
        const auto x = a.next_u32();
        same_b += x == b.next_u32();
        same_c += x == c.next_u32();
    }
    EXPECT_LT(same_b, 3);
    EXPECT_LT(same_c, 3);
}

TEST(CounterRng, UniformRanges) {
    CounterRng rng(1, 2);
    for (int k = 0; k < 100000; ++k) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const double v = rng.uniform_open_zero();
        ASSERT_GT(v, 0.0);
        ASSERT_LE(v, 1.0);
        ASSERT_LT(rng.uniform_below(7), 7u);
    }
    EXPECT_THROW(rng.uniform_below(0), std::invalid_argument);
}

TEST(CounterRng, UniformBelowIsBalanced) {
    CounterRng rng(5, 5);
    std::vector<int> counts(10, 0);
    const int draws = 200000;
    for (int k = 0; k < draws; ++k) ++counts[rng.uniform_below(10)];
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - draws / 10.0) * (c - draws / 10.0) / (draws / 10.0);
    EXPECT_LT(chi2, 27.877);  // chi-square, 9 dof, upper 0.001 point
}

TEST(DeriveStream, DistinctForNearbyKeys) {
    EXPECT_NE(derive_stream(kStreamTrial, 0), derive_stream(kStreamTrial, 1));
    EXPECT_NE(derive_stream(kStreamTrial, 0), derive_stream(kStreamGaussian, 0));
    EXPECT_EQ(derive_stream(kStreamTrial, 5), derive_stream(kStreamTrial, 5));
}

TEST(GaussianSampler, MeanAndVariance) {
    GaussianSampler g(2024, 1);
    const std::vector<double> x = sample_gaussian(g, 1000000);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= x.size();
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= x.size() - 1;
    EXPECT_NEAR(mean, 0.0, 0.005);
    EXPECT_NEAR(var, 1.0, 0.01);
}

TEST(GaussianSampler, TailFrequencies) {
    GaussianSampler g(11, 3);
    int beyond1 = 0, beyond2 = 0;
    const int draws = 400000;
    for (int k = 0; k < draws; ++k) {
        const double v = std::abs(g.next());
        beyond1 += v > 1.0;
        beyond2 += v > 2.0;
    }
    EXPECT_NEAR(beyond1 / static_cast<double>(draws), 0.3173105, 0.004);
    EXPECT_NEAR(beyond2 / static_cast<double>(draws), 0.0455003, 0.0015);
}

TEST(GaussianSampler, BitIdenticalUnderSameSeed) {
    GaussianSampler a(9, 9), b(9, 9);
    const auto x = sample_gaussian(a, 1001);
    const auto y = sample_gaussian(b, 1001);
    EXPECT_EQ(x, y);
}

TEST(GaussianSampler, RejectsZeroDimension) {
    GaussianSampler g(1, 1);
    EXPECT_THROW(sample_gaussian(g, 0), std::invalid_argument);
}
