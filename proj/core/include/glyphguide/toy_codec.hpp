#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "glyphguide/entropy.hpp"
#include "glyphguide/image.hpp"

namespace glyphguide {

/// Planar C x h x w latent grid (real-valued before quantization).
template <class T>
struct Latent {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<T> values;

    T at(int c, int y, int x) const { return values[(static_cast<std::size_t>(c) * height + y) * width + x]; }
    friend bool operator==(const Latent&, const Latent&) = default;
};

using RealLatent = Latent<double>;
using LatentTensor = Latent<int>;

/// Codec parameters that travel in the container header.
struct SideInfo {
    int stride = 4;
    double gain = 12.0;
    /// Per-channel sigma in units of 1/1000, as transmitted.
    std::vector<std::uint16_t> sigma_milli;

    double sigma(int c) const { return sigma_milli[static_cast<std::size_t>(c)] / 1000.0; }
    friend bool operator==(const SideInfo&, const SideInfo&) = default;
};

/// "TBIC" container: u8 version, u32 W, u32 H, u8 C, u8 stride, f64 gain,
/// C x u16 sigma (1/1000 units), then the range-coded latent (channel-major).
struct CodedImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    SideInfo side;
    std::vector<std::uint8_t> bitstream;

    std::vector<std::uint8_t> to_bytes() const;
    static CodedImage from_bytes(std::span<const std::uint8_t> bytes);

    std::size_t byte_size() const;
    /// 8 * (header + stream bytes) / (H * W).
    double bpp() const;

    friend bool operator==(const CodedImage&, const CodedImage&) = default;
};

inline constexpr std::size_t kCodedHeaderFixedBytes = 4 + 1 + 4 + 4 + 1 + 1 + 8;

void validate_codec_params(int stride, double gain);

/// Per-channel s x s mean pooling (reflect padding to a multiple of s),
/// centered by -0.5 and scaled by the gain.
RealLatent analyze(const Image& img, int stride, double gain);

/// Round half away from zero.
LatentTensor quantize(const RealLatent& latent);

/// Inverse of the analysis scaling followed by the upsampler: values are
/// divided by the gain, shifted by +0.5 and bilinearly upsampled by `stride`;
/// each s x s block is then shifted so its mean equals the latent sample.
/// The result is cropped to height x width and clamped to [0, 1].
Image synthesize(const RealLatent& latent, int stride, double gain, int height, int width);

/// Per-channel sigma: root mean square of the quantized latent (the spread
/// under the zero-mean model), floored at kSigmaFloor and quantized to 1/1000.
std::vector<std::uint16_t> channel_sigmas(const LatentTensor& latent);

CodedImage compress(const Image& img, int stride = 4, double gain = 12.0, int bound = kDefaultAlphabetBound);
Image decompress(const CodedImage& coded, int bound = kDefaultAlphabetBound);

/// bpp of the image container plus the auxiliary stream.
double total_bpp(const CodedImage& coded, std::span<const std::uint8_t> aux);

}  // namespace glyphguide
