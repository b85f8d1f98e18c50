#include "glyphguide/toy_codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glyphguide/aux_stream.hpp"
#include "glyphguide/byte_io.hpp"
#include "glyphguide/errors.hpp"

namespace glyphguide {

namespace {

constexpr std::uint8_t kMagic[4] = {'T', 'B', 'I', 'C'};
constexpr std::uint8_t kVersion = 1;

int round_up(int v, int s) { return (v + s - 1) / s * s; }

// Whole-sample symmetric reflection (no edge repeat), folded for short axes.
int reflect(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

std::vector<SymbolModel> models_for(const SideInfo& side, int channels, int plane) {
    std::vector<SymbolModel> models;
    models.reserve(static_cast<std::size_t>(channels) * plane);
    for (int c = 0; c < channels; ++c) models.insert(models.end(), plane, SymbolModel(0.0, side.sigma(c)));
    return models;
}

}  // namespace

void validate_codec_params(int stride, double gain) {
    if (stride != 2 && stride != 4 && stride != 8)
        throw ValidationError("codec stride must be 2, 4 or 8, got " + std::to_string(stride));
    if (!(gain > 0.0) || !std::isfinite(gain)) throw ValidationError("codec gain must be positive");
}

RealLatent analyze(const Image& img, int stride, double gain) {
    validate_codec_params(stride, gain);
    const int hp = round_up(img.height(), stride) / stride;
    const int wp = round_up(img.width(), stride) / stride;
    RealLatent out{img.channels(), hp, wp, {}};
    out.values.resize(static_cast<std::size_t>(img.channels()) * hp * wp);
    const double inv = 1.0 / (stride * stride);
    for (int c = 0; c < img.channels(); ++c)
        for (int by = 0; by < hp; ++by)
            for (int bx = 0; bx < wp; ++bx) {
                double acc = 0.0;
                for (int dy = 0; dy < stride; ++dy) {
                    const int y = reflect(by * stride + dy, img.height());
                    for (int dx = 0; dx < stride; ++dx) acc += img.at(c, y, reflect(bx * stride + dx, img.width()));
                }
                out.values[(static_cast<std::size_t>(c) * hp + by) * wp + bx] = (acc * inv - 0.5) * gain;
            }
    return out;
}

LatentTensor quantize(const RealLatent& latent) {
    LatentTensor out{latent.channels, latent.height, latent.width, {}};
    out.values.reserve(latent.values.size());
    // Saturate far outside any alphabet so the cast stays defined; compress
    // rejects such values anyway.
    constexpr double kLimit = 1 << 30;
    for (double v : latent.values) out.values.push_back(static_cast<int>(std::round(std::clamp(v, -kLimit, kLimit))));
    return out;
}

Image synthesize(const RealLatent& latent, int stride, double gain, int height, int width) {
    validate_codec_params(stride, gain);
    const int hp = latent.height * stride, wp = latent.width * stride;
    if (height <= 0 || width <= 0 || height > hp || width > wp)
        throw ValidationError("synthesize: target size exceeds the latent grid");
    const std::size_t lplane = static_cast<std::size_t>(latent.height) * latent.width;

    // Bilinear source coordinate of output pixel i: (i + 0.5) / s - 0.5, clamped.
    struct Tap {
        int i0, i1;
        double w1;
    };
    auto taps = [stride](int n_out, int n_in) {
        std::vector<Tap> t(static_cast<std::size_t>(n_out));
        for (int i = 0; i < n_out; ++i) {
            double src = (i + 0.5) / stride - 0.5;
            src = std::clamp(src, 0.0, static_cast<double>(n_in - 1));
            int i0 = static_cast<int>(std::floor(src));
            int i1 = std::min(i0 + 1, n_in - 1);
            t[static_cast<std::size_t>(i)] = {i0, i1, src - i0};
        }
        return t;
    };
    const auto ty = taps(hp, latent.height), tx = taps(wp, latent.width);

    std::vector<double> out(static_cast<std::size_t>(latent.channels) * height * width);
    std::vector<double> up(static_cast<std::size_t>(hp) * wp);
    for (int c = 0; c < latent.channels; ++c) {
        auto value = [&](int y, int x) {
            return latent.values[c * lplane + static_cast<std::size_t>(y) * latent.width + x] / gain + 0.5;
        };
        for (int y = 0; y < hp; ++y) {
            const Tap& a = ty[static_cast<std::size_t>(y)];
            for (int x = 0; x < wp; ++x) {
                const Tap& b = tx[static_cast<std::size_t>(x)];
                double top = value(a.i0, b.i0) * (1.0 - b.w1) + value(a.i0, b.i1) * b.w1;
                double bot = value(a.i1, b.i0) * (1.0 - b.w1) + value(a.i1, b.i1) * b.w1;
                up[static_cast<std::size_t>(y) * wp + x] = top * (1.0 - a.w1) + bot * a.w1;
            }
        }
        // Block-mean correction: pooling the output reproduces the latent.
        for (int by = 0; by < latent.height; ++by)
            for (int bx = 0; bx < latent.width; ++bx) {
                double acc = 0.0;
                for (int dy = 0; dy < stride; ++dy)
                    for (int dx = 0; dx < stride; ++dx)
                        acc += up[static_cast<std::size_t>(by * stride + dy) * wp + bx * stride + dx];
                const double shift = value(by, bx) - acc / (stride * stride);
                for (int dy = 0; dy < stride; ++dy)
                    for (int dx = 0; dx < stride; ++dx)
                        up[static_cast<std::size_t>(by * stride + dy) * wp + bx * stride + dx] += shift;
            }
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                out[(static_cast<std::size_t>(c) * height + y) * width + x] =
                    up[static_cast<std::size_t>(y) * wp + x];
    }
    return image_from_clamped(height, width, latent.channels, std::move(out));
}

std::vector<std::uint16_t> channel_sigmas(const LatentTensor& latent) {
    const std::size_t plane = static_cast<std::size_t>(latent.height) * latent.width;
    std::vector<std::uint16_t> out;
    for (int c = 0; c < latent.channels; ++c) {
        double sq = 0.0;
        for (std::size_t i = 0; i < plane; ++i) {
            double v = latent.values[c * plane + i];
            sq += v * v;
        }
        double sigma = std::max(std::sqrt(sq / static_cast<double>(plane)), kSigmaFloor);
        double milli = std::clamp(std::round(sigma * 1000.0), 1.0, 65535.0);
        out.push_back(static_cast<std::uint16_t>(milli));
    }
    return out;
}

CodedImage compress(const Image& img, int stride, double gain, int bound) {
    RealLatent latent = analyze(img, stride, gain);
    LatentTensor q = quantize(latent);
    for (std::size_t i = 0; i < q.values.size(); ++i)
        if (std::abs(q.values[i]) > bound)
            throw RangeError("latent value " + std::to_string(q.values[i]) + " exceeds alphabet bound " +
                             std::to_string(bound) + "; use a lower gain");
    CodedImage out;
    out.width = img.width();
    out.height = img.height();
    out.channels = img.channels();
    out.side = {stride, gain, channel_sigmas(q)};
    const int plane = q.height * q.width;
    out.bitstream = rc_encode(q.values, models_for(out.side, q.channels, plane), bound);
    return out;
}

Image decompress(const CodedImage& coded, int bound) {
    const int stride = coded.side.stride;
    validate_codec_params(stride, coded.side.gain);
    const int hl = round_up(coded.height, stride) / stride;
    const int wl = round_up(coded.width, stride) / stride;
    auto symbols = rc_decode(coded.bitstream, models_for(coded.side, coded.channels, hl * wl), bound);
    RealLatent latent{coded.channels, hl, wl, std::vector<double>(symbols.begin(), symbols.end())};
    return synthesize(latent, stride, coded.side.gain, coded.height, coded.width);
}

std::vector<std::uint8_t> CodedImage::to_bytes() const {
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    bytes::put_u8(out, kVersion);
    bytes::put_u32(out, static_cast<std::uint32_t>(width));
    bytes::put_u32(out, static_cast<std::uint32_t>(height));
    bytes::put_u8(out, static_cast<std::uint8_t>(channels));
    bytes::put_u8(out, static_cast<std::uint8_t>(side.stride));
    bytes::put_f64(out, side.gain);
    for (std::uint16_t s : side.sigma_milli) bytes::put_u16(out, s);
    out.insert(out.end(), bitstream.begin(), bitstream.end());
    return out;
}

CodedImage CodedImage::from_bytes(std::span<const std::uint8_t> data) {
    if (data.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), data.begin()))
        throw DecodeError("TBIC: bad magic");
    bytes::Reader in(data.subspan(4));
    if (in.u8("version") != kVersion) throw DecodeError("TBIC: unsupported version");
    CodedImage out;
    std::uint32_t w = in.u32("width"), h = in.u32("height");
    if (w == 0 || h == 0 || w > (1u << 16) || h > (1u << 16)) throw DecodeError("TBIC: invalid dimensions");
    out.width = static_cast<int>(w);
    out.height = static_cast<int>(h);
    out.channels = in.u8("channels");
    if (out.channels != 1 && out.channels != 3) throw DecodeError("TBIC: invalid channel count");
    out.side.stride = in.u8("stride");
    out.side.gain = in.f64("gain");
    try {
        validate_codec_params(out.side.stride, out.side.gain);
    } catch (const ValidationError& e) {
        throw DecodeError(std::string("TBIC: ") + e.what());
    }
    for (int c = 0; c < out.channels; ++c) {
        std::uint16_t s = in.u16("sigma");
        if (s == 0) throw DecodeError("TBIC: sigma below floor");
        out.side.sigma_milli.push_back(s);
    }
    auto rest = in.take(in.remaining(), "bitstream");
    out.bitstream.assign(rest.begin(), rest.end());
    return out;
}

std::size_t CodedImage::byte_size() const {
    return kCodedHeaderFixedBytes + 2 * side.sigma_milli.size() + bitstream.size();
}

double CodedImage::bpp() const {
    return 8.0 * static_cast<double>(byte_size()) / (static_cast<double>(height) * width);
}

double total_bpp(const CodedImage& coded, std::span<const std::uint8_t> aux) {
    return coded.bpp() + aux_bpp(aux, coded.height, coded.width);
}

}  // namespace glyphguide
