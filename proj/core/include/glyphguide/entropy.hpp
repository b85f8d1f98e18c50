#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace glyphguide {

inline constexpr double kSigmaFloor = 1e-3;
inline constexpr int kDefaultAlphabetBound = 64;
/// Total count of every quantized CDF (16-bit probability precision).
inline constexpr std::uint32_t kCdfTotal = 1u << 16;

/// Discretized Gaussian: the N(mu, sigma^2) density convolved with U(-1/2, 1/2)
/// and sampled at the integers. sigma is raised to kSigmaFloor at construction.
class SymbolModel {
public:
    SymbolModel(double mu, double sigma);

    double mu() const { return mu_; }
    double sigma() const { return sigma_; }

    friend bool operator==(const SymbolModel&, const SymbolModel&) = default;

private:
    double mu_;
    double sigma_;
};

/// Standard normal CDF via erfc.
double normal_cdf(double x);

/// Phi((k - mu + 1/2) / sigma) - Phi((k - mu - 1/2) / sigma). Throws
/// RangeError if |k| > bound.
double pmf(const SymbolModel& model, int k, int bound = kDefaultAlphabetBound);

/// -sum log2 pmf(model_i, s_i), each probability floored at 2^-16.
double rate_bits(std::span<const int> symbols, std::span<const SymbolModel> models,
                 int bound = kDefaultAlphabetBound);

/// Cumulative counts over [-bound, bound]: 2*bound + 2 entries, strictly
/// increasing from 0 to kCdfTotal. The pmf is renormalized onto the truncated
/// support and every symbol gets at least one count.
std::vector<std::uint32_t> quantized_cdf(const SymbolModel& model, int bound = kDefaultAlphabetBound);

/// Byte-oriented range coder with a 32-bit range and carry propagation.
/// The coding loop is integer-only; the stream is identical on every platform
/// given identical CDF tables.
class RangeEncoder {
public:
    void encode(std::uint32_t cum, std::uint32_t freq);
    std::vector<std::uint8_t> finish();

private:
    void shift_low();

    std::uint64_t low_ = 0;
    std::uint32_t range_ = 0xFFFFFFFFu;
    std::uint8_t cache_ = 0;
    std::uint64_t cache_size_ = 1;
    std::vector<std::uint8_t> out_;
};

class RangeDecoder {
public:
    explicit RangeDecoder(std::span<const std::uint8_t> bytes);

    /// Decodes one symbol index against `cdf` (as produced by quantized_cdf).
    std::size_t decode(std::span<const std::uint32_t> cdf);

private:
    std::uint8_t next_byte();

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
    std::uint32_t code_ = 0;
    std::uint32_t range_ = 0xFFFFFFFFu;
};

/// Encodes symbols in [-bound, bound] under per-position models.
std::vector<std::uint8_t> rc_encode(std::span<const int> symbols, std::span<const SymbolModel> models,
                                    int bound = kDefaultAlphabetBound);

/// Decodes models.size() symbols. A stream that runs out of bytes or leaves
/// the coder state inconsistent raises DecodeError; other corruption yields
/// wrong symbols (integrity belongs to the container).
std::vector<int> rc_decode(std::span<const std::uint8_t> bytes, std::span<const SymbolModel> models,
                           int bound = kDefaultAlphabetBound);

}  // namespace glyphguide
