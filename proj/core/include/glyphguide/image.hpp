#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace glyphguide {

/// H x W x C raster with samples in [0, 1].
///
/// Storage is planar: sample (c, y, x) lives at `(c * H + y) * W + x`, so a
/// channel is one contiguous H*W block. Images are immutable once built;
/// construction rejects out-of-range or non-finite samples instead of
/// clamping them.
class Image {
public:
    Image() = default;

    /// All-zero image.
    Image(int height, int width, int channels);

    /// Takes ownership of planar samples; validates size and range.
    Image(int height, int width, int channels, std::vector<double> planar);

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double at(int c, int y, int x) const {
        return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
    }

    std::span<const double> data() const { return data_; }
    std::span<const double> plane(int c) const {
        return std::span<const double>(data_).subspan(
            static_cast<std::size_t>(c) * height_ * width_,
            static_cast<std::size_t>(height_) * width_);
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

/// Clamps every sample to [0, 1] before construction. Used where a pipeline
/// stage legitimately overshoots (synthesis, fusion output at inference).
Image image_from_clamped(int height, int width, int channels, std::vector<double> planar);

/// Parses binary PPM (P6) or PGM (P5) with maxval 255. Header comments are
/// skipped. Throws ParseError naming the offending header field.
Image read_ppm(std::span<const std::uint8_t> bytes);

/// Canonical writer: "P6\n<w> <h>\n255\n" (or P5) followed by samples
/// quantized as round-half-away-from-zero(v * 255).
std::vector<std::uint8_t> write_ppm(const Image& img);

/// round-half-away-from-zero(v * 255), clamped to [0, 255].
std::uint8_t quantize_sample(double v);

/// Exact sub-raster copy. Throws BoundsError if the window leaves the image.
Image crop(const Image& img, int x0, int y0, int w, int h);

/// Replicates a single-channel image into three identical channels.
Image to_rgb(const Image& img);

Image read_ppm_file(const std::string& path);
void write_ppm_file(const std::string& path, const Image& img);

}  // namespace glyphguide
