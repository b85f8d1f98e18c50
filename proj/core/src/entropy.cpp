#include "glyphguide/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "glyphguide/errors.hpp"

namespace glyphguide {

namespace {

void check_bound(int bound) {
    if (bound < 0 || 2 * bound + 1 > static_cast<int>(kCdfTotal / 2))
        throw RangeError("alphabet bound " + std::to_string(bound) + " unsupported");
}

// Phi(b) - Phi(a) for a < b, evaluated on the side of the tail that keeps
// erfc arguments positive.
double normal_interval(double a, double b) {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    if (a > 0.0) return 0.5 * (std::erfc(a * inv_sqrt2) - std::erfc(b * inv_sqrt2));
    if (b < 0.0) return 0.5 * (std::erfc(-b * inv_sqrt2) - std::erfc(-a * inv_sqrt2));
    return 1.0 - 0.5 * (std::erfc(-a * inv_sqrt2) + std::erfc(b * inv_sqrt2));
}

struct CdfCache {
    bool valid = false;
    SymbolModel model{0.0, 1.0};
    std::vector<std::uint32_t> cdf;

    std::span<const std::uint32_t> get(const SymbolModel& m, int bound) {
        if (!valid || !(model == m)) {
            cdf = quantized_cdf(m, bound);
            model = m;
            valid = true;
        }
        return cdf;
    }
};

}  // namespace

SymbolModel::SymbolModel(double mu, double sigma) : mu_(mu), sigma_(sigma) {
    if (!std::isfinite(mu) || std::isnan(sigma)) throw ValidationError("symbol model parameters must be finite");
    sigma_ = std::max(sigma, kSigmaFloor);
    if (!std::isfinite(sigma_)) throw ValidationError("symbol model sigma must be finite");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double pmf(const SymbolModel& model, int k, int bound) {
    if (k < -bound || k > bound)
        throw RangeError("symbol " + std::to_string(k) + " outside alphabet [-" + std::to_string(bound) + ", " +
                         std::to_string(bound) + "]");
    const double d = k - model.mu();
    return normal_interval((d - 0.5) / model.sigma(), (d + 0.5) / model.sigma());
}

double rate_bits(std::span<const int> symbols, std::span<const SymbolModel> models, int bound) {
    if (symbols.size() != models.size())
        throw ValidationError("rate_bits: " + std::to_string(symbols.size()) + " symbols but " +
                              std::to_string(models.size()) + " models");
    constexpr double floor_p = 1.0 / 65536.0;
    double bits = 0.0;
    for (std::size_t i = 0; i < symbols.size(); ++i)
        bits -= std::log2(std::max(pmf(models[i], symbols[i], bound), floor_p));
    return bits;
}

std::vector<std::uint32_t> quantized_cdf(const SymbolModel& model, int bound) {
    check_bound(bound);
    const int n = 2 * bound + 1;
    std::vector<double> p(n);
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
        p[i] = pmf(model, i - bound, bound);
        mass += p[i];
    }
    const double spread = static_cast<double>(kCdfTotal - static_cast<std::uint32_t>(n));
    std::vector<std::uint32_t> freq(n);
    std::uint64_t total = 0;
    int argmax = 0;
    for (int i = 0; i < n; ++i) {
        double share = mass > 0.0 ? p[i] / mass : 0.0;
        freq[i] = 1u + static_cast<std::uint32_t>(std::floor(share * spread));
        total += freq[i];
        if (p[i] > p[argmax]) argmax = i;
    }
    // Rounding leftovers go to the most probable symbol.
    freq[argmax] += static_cast<std::uint32_t>(kCdfTotal - total);

    std::vector<std::uint32_t> cdf(n + 1, 0);
    for (int i = 0; i < n; ++i) cdf[i + 1] = cdf[i] + freq[i];
    return cdf;
}

// ---- range coder -------------------------------------------------------------

namespace {
constexpr std::uint32_t kTop = 1u << 24;
constexpr int kPrecisionBits = 16;
}  // namespace

void RangeEncoder::encode(std::uint32_t cum, std::uint32_t freq) {
    const std::uint32_t r = range_ >> kPrecisionBits;
    low_ += static_cast<std::uint64_t>(r) * cum;
    range_ = r * freq;
    while (range_ < kTop) {
        range_ <<= 8;
        shift_low();
    }
}

void RangeEncoder::shift_low() {
    if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
        const auto carry = static_cast<std::uint8_t>(low_ >> 32);
        std::uint8_t temp = cache_;
        do {
            out_.push_back(static_cast<std::uint8_t>(temp + carry));
            temp = 0xFF;
        } while (--cache_size_ != 0);
        cache_ = static_cast<std::uint8_t>(static_cast<std::uint32_t>(low_) >> 24);
    }
    ++cache_size_;
    low_ = (low_ & 0x00FFFFFFu) << 8;
}

std::vector<std::uint8_t> RangeEncoder::finish() {
    for (int i = 0; i < 5; ++i) shift_low();
    return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes) : in_(bytes) {
    for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
    if (pos_ >= in_.size()) throw DecodeError("range-coded stream is truncated");
    return in_[pos_++];
}

std::size_t RangeDecoder::decode(std::span<const std::uint32_t> cdf) {
    const std::uint32_t r = range_ >> kPrecisionBits;
    const std::uint32_t target = code_ / r;
    if (target >= kCdfTotal) throw DecodeError("range-coded stream is corrupt");
    // Largest s with cdf[s] <= target.
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    const auto s = static_cast<std::size_t>(it - cdf.begin()) - 1;
    code_ -= r * cdf[s];
    range_ = r * (cdf[s + 1] - cdf[s]);
    while (range_ < kTop) {
        code_ = (code_ << 8) | next_byte();
        range_ <<= 8;
    }
    return s;
}

std::vector<std::uint8_t> rc_encode(std::span<const int> symbols, std::span<const SymbolModel> models, int bound) {
    if (symbols.size() != models.size())
        throw ValidationError("rc_encode: " + std::to_string(symbols.size()) + " symbols but " +
                              std::to_string(models.size()) + " models");
    check_bound(bound);
    for (std::size_t i = 0; i < symbols.size(); ++i)
        if (symbols[i] < -bound || symbols[i] > bound)
            throw RangeError("rc_encode: symbol " + std::to_string(symbols[i]) + " at position " + std::to_string(i) +
                             " outside alphabet [-" + std::to_string(bound) + ", " + std::to_string(bound) + "]");
    RangeEncoder enc;
    CdfCache cache;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        auto cdf = cache.get(models[i], bound);
        const auto idx = static_cast<std::size_t>(symbols[i] + bound);
        enc.encode(cdf[idx], cdf[idx + 1] - cdf[idx]);
    }
    return enc.finish();
}

std::vector<int> rc_decode(std::span<const std::uint8_t> bytes, std::span<const SymbolModel> models, int bound) {
    check_bound(bound);
    RangeDecoder dec(bytes);
    CdfCache cache;
    std::vector<int> out;
    out.reserve(models.size());
    for (const SymbolModel& m : models) out.push_back(static_cast<int>(dec.decode(cache.get(m, bound))) - bound);
    return out;
}

}  // namespace glyphguide
