#include <gtest/gtest.h>

#include <cmath>

#include "glyphguide/entropy.hpp"
#include "glyphguide/errors.hpp"
#include "glyphguide/random.hpp"

namespace glyphguide {
namespace {

struct Stream {
    std::vector<int> symbols;
    std::vector<SymbolModel> models;
};

// Symbols drawn from their own models (rounded Gaussian samples) with
// occasional arbitrary in-alphabet outliers.
Stream random_stream(Rng& rng, std::size_t n, double sigma_lo, double sigma_hi, int bound = kDefaultAlphabetBound) {
    Stream s;
    for (std::size_t i = 0; i < n; ++i) {
        const SymbolModel m(rng.uniform(-3, 3), rng.uniform(sigma_lo, sigma_hi));
        int k = static_cast<int>(std::lround(m.mu() + m.sigma() * rng.normal()));
        if (rng.integer(0, 99) == 0) k = rng.integer(-bound, bound);
        s.symbols.push_back(std::clamp(k, -bound, bound));
        s.models.push_back(m);
    }
    return s;
}

TEST(SymbolModel, SigmaFloor) {
    EXPECT_EQ(SymbolModel(0, 0).sigma(), kSigmaFloor);
    EXPECT_EQ(SymbolModel(0, -5).sigma(), kSigmaFloor);
    EXPECT_EQ(SymbolModel(0, 2).sigma(), 2.0);
    EXPECT_THROW(SymbolModel(std::nan(""), 1), ValidationError);
}

TEST(Pmf, StandardNormalAtZero) {
    // 2 Phi(1/2) - 1 = erf(1 / (2 sqrt 2)).
    const double oracle = std::erf(0.5 / std::sqrt(2.0));
    EXPECT_NEAR(pmf(SymbolModel(0, 1), 0), 0.3829249, 1e-6);
    EXPECT_NEAR(pmf(SymbolModel(0, 1), 0), oracle, 1e-15);
}

TEST(Pmf, MatchesErfDifferences) {
    Rng rng(61);
    for (int i = 0; i < 200; ++i) {
        const SymbolModel m(rng.uniform(-5, 5), rng.uniform(0.2, 10));
        const int k = rng.integer(-20, 20);
        const double hi = (k - m.mu() + 0.5) / m.sigma(), lo = (k - m.mu() - 0.5) / m.sigma();
        const double oracle = 0.5 * (std::erf(hi / std::sqrt(2.0)) - std::erf(lo / std::sqrt(2.0)));
        EXPECT_NEAR(pmf(m, k), oracle, 1e-12);
    }
}

TEST(Pmf, SymmetricAroundZeroMean) {
    for (double sigma : {0.3, 1.0, 2.5, 7.0})
        for (int k = 0; k <= 64; ++k) EXPECT_EQ(pmf(SymbolModel(0, sigma), k), pmf(SymbolModel(0, sigma), -k));
}

TEST(Pmf, MassOnTruncatedAlphabet) {
    for (double sigma : {kSigmaFloor, 0.1, 0.5, 1.0, 2.0, 3.0, 4.0}) {
        double total = 0.0;
        for (int k = -64; k <= 64; ++k) total += pmf(SymbolModel(0, sigma), k);
        EXPECT_GE(total, 1 - 1e-9) << sigma;
        EXPECT_LE(total, 1 + 1e-12) << sigma;
    }
}

TEST(Pmf, TailsStayPositiveAndAccurate) {
    // Far tail: differences of erfc keep relative precision.
    const double p = pmf(SymbolModel(0, 1), 10);
    const double oracle = 0.5 * (std::erfc(9.5 / std::sqrt(2.0)) - std::erfc(10.5 / std::sqrt(2.0)));
    EXPECT_GT(p, 0.0);
    EXPECT_NEAR(p / oracle, 1.0, 1e-9);
}

TEST(Pmf, OutsideAlphabetIsRangeError) {
    EXPECT_THROW(pmf(SymbolModel(0, 1), 65), RangeError);
    EXPECT_THROW(pmf(SymbolModel(0, 1), -65), RangeError);
    EXPECT_NO_THROW(pmf(SymbolModel(0, 1), 5, 5));
    EXPECT_THROW(pmf(SymbolModel(0, 1), 6, 5), RangeError);
}

TEST(RateBits, OneBitSymbol) {
    // 2 Phi(0.5 / sigma) - 1 = 1/2 when 0.5 / sigma is the upper quartile of N(0,1).
    const double sigma = 0.5 / 0.67448975019608174;
    const int k[] = {0};
    const SymbolModel m[] = {SymbolModel(0, sigma)};
    EXPECT_NEAR(rate_bits(k, m), 1.0, 1e-9);
}

TEST(RateBits, DeterministicSymbolIsFree) {
    const int k[] = {3};
    const SymbolModel m[] = {SymbolModel(3.2, 0)};
    EXPECT_LE(rate_bits(k, m), 0.001);
}

TEST(RateBits, AdditiveAndFloored) {
    Rng rng(62);
    const Stream s = random_stream(rng, 50, 0.5, 3);
    double sum = 0.0;
    for (std::size_t i = 0; i < s.symbols.size(); ++i)
        sum += rate_bits(std::span(&s.symbols[i], 1), std::span(&s.models[i], 1));
    EXPECT_NEAR(rate_bits(s.symbols, s.models), sum, 1e-9);
    const int far[] = {60};
    const SymbolModel tight[] = {SymbolModel(0, 0.5)};
    EXPECT_EQ(rate_bits(far, tight), 16.0);
    EXPECT_THROW(rate_bits(std::span(s.symbols.data(), 2), std::span(s.models.data(), 3)), ValidationError);
}

TEST(QuantizedCdf, StrictlyMonotoneWithFullTotal) {
    Rng rng(63);
    for (int i = 0; i < 100; ++i) {
        const SymbolModel m(rng.uniform(-70, 70), std::exp(rng.uniform(-8, 4)));
        const auto cdf = quantized_cdf(m);
        ASSERT_EQ(cdf.size(), 2u * kDefaultAlphabetBound + 2);
        EXPECT_EQ(cdf.front(), 0u);
        EXPECT_EQ(cdf.back(), kCdfTotal);
        for (std::size_t j = 1; j < cdf.size(); ++j) EXPECT_GT(cdf[j], cdf[j - 1]);
    }
}

TEST(QuantizedCdf, TracksThePmf) {
    const SymbolModel m(0.3, 2.0);
    const auto cdf = quantized_cdf(m, 16);
    double mass = 0.0;
    for (int k = -16; k <= 16; ++k) mass += pmf(m, k, 16);
    for (int k = -16; k <= 16; ++k) {
        const double q = static_cast<double>(cdf[static_cast<std::size_t>(k + 17)] - cdf[static_cast<std::size_t>(k + 16)]) / kCdfTotal;
        EXPECT_NEAR(q, pmf(m, k, 16) / mass, 40.0 / kCdfTotal);
    }
}

TEST(RangeCoder, EmptySequence) {
    const auto bytes = rc_encode({}, {});
    EXPECT_LE(bytes.size(), 8u);
    EXPECT_TRUE(rc_decode(bytes, {}).empty());
}

TEST(RangeCoder, RandomRoundtrip) {
    Rng rng(64);
    const Stream s = random_stream(rng, 20000, 1e-3, 12);
    EXPECT_EQ(rc_decode(rc_encode(s.symbols, s.models), s.models), s.symbols);
}

TEST(RangeCoder, ExtremeSymbolsRoundtrip) {
    // Every symbol sits in the far tail of a tight model: one count each.
    std::vector<int> symbols;
    std::vector<SymbolModel> models;
    for (int i = 0; i < 2000; ++i) {
        symbols.push_back(i % 2 ? 64 : -64);
        models.emplace_back(0.0, kSigmaFloor);
    }
    const auto bytes = rc_encode(symbols, models);
    EXPECT_EQ(rc_decode(bytes, models), symbols);
    EXPECT_NEAR(static_cast<double>(bytes.size()), 2000 * 16 / 8.0, 8.0);
}

TEST(RangeCoder, LengthTracksRateEstimate) {
    Rng rng(65);
    for (int trial = 0; trial < 5; ++trial) {
        const Stream s = random_stream(rng, 10000, 0.3, 4);
        const double estimate = rate_bits(s.symbols, s.models) / 8.0;
        const auto bytes = rc_encode(s.symbols, s.models);
        EXPECT_LE(std::abs(static_cast<double>(bytes.size()) - estimate), 0.01 * estimate + 8.0);
        EXPECT_LE(static_cast<double>(bytes.size()), estimate * 1.01 + 8.0);
    }
}

TEST(RangeCoder, SmallBound) {
    Rng rng(66);
    const Stream s = random_stream(rng, 3000, 0.5, 2, 4);
    EXPECT_EQ(rc_decode(rc_encode(s.symbols, s.models, 4), s.models, 4), s.symbols);
}

TEST(RangeCoder, OutOfAlphabetIsEncodeError) {
    const int k[] = {65};
    const SymbolModel m[] = {SymbolModel(0, 1)};
    EXPECT_THROW(rc_encode(k, m), RangeError);
    EXPECT_THROW(rc_encode(std::span(k, 1), {}), ValidationError);
}

TEST(RangeCoder, TruncatedStreamIsDecodeError) {
    Rng rng(67);
    const Stream s = random_stream(rng, 2000, 1, 4);
    const auto bytes = rc_encode(s.symbols, s.models);
    EXPECT_THROW(rc_decode(std::span(bytes.data(), bytes.size() / 2), s.models), DecodeError);
    EXPECT_THROW(rc_decode(std::span(bytes.data(), 3), s.models), DecodeError);
}

// Regression fixture: the coder is integer-only after CDF construction, so
// this stream must not change across platforms or compilers.
TEST(RangeCoder, PinnedStream) {
    std::vector<int> symbols;
    std::vector<SymbolModel> models;
    for (int i = 0; i < 32; ++i) {
        symbols.push_back((i * 7) % 9 - 4);
        models.emplace_back(0.25 * (i % 5) - 0.5, 0.5 + 0.125 * (i % 11));
    }
    const auto bytes = rc_encode(symbols, models);
    std::string hex;
    for (std::uint8_t b : bytes) {
        char buf[3];
        std::snprintf(buf, sizeof buf, "%02x", b);
        hex += buf;
    }
    EXPECT_EQ(hex, "00003cff85c0e690c9f78ac163ac5f440ec75243029258a6792235eafe00");
    EXPECT_EQ(rc_decode(bytes, models), symbols);
}

}  // namespace
}  // namespace glyphguide
