#include "glyphguide/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "glyphguide/errors.hpp"

namespace glyphguide {

namespace {

void check_dims(int height, int width, int channels) {
    if (height <= 0 || width <= 0)
        throw ValidationError("image dimensions must be positive, got " + std::to_string(width) +
                              "x" + std::to_string(height));
    if (channels != 1 && channels != 3)
        throw ValidationError("image channels must be 1 or 3, got " + std::to_string(channels));
}

// Reads one whitespace-delimited header token, skipping '#' comments.
class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::string token(const char* field) {
        skip_space_and_comments();
        std::string out;
        while (pos_ < bytes_.size() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#')
            out.push_back(static_cast<char>(bytes_[pos_++]));
        if (out.empty()) throw ParseError(std::string("ppm: missing header field '") + field + "'");
        return out;
    }

    int number(const char* field) {
        std::string t = token(field);
        if (t.size() > 9 || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }))
            throw ParseError(std::string("ppm: invalid header field '") + field + "': '" + t + "'");
        return std::stoi(t);
    }

    // Exactly one whitespace byte separates maxval from the raster.
    void single_space(const char* field) {
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_]))
            throw ParseError(std::string("ppm: expected whitespace after header field '") + field + "'");
        ++pos_;
    }

    std::size_t pos() const { return pos_; }

private:
    static bool is_space(std::uint8_t c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

Image::Image(int height, int width, int channels)
    : height_(height), width_(width), channels_(channels) {
    check_dims(height, width, channels);
    data_.assign(static_cast<std::size_t>(height) * width * channels, 0.0);
}

Image::Image(int height, int width, int channels, std::vector<double> planar)
    : height_(height), width_(width), channels_(channels), data_(std::move(planar)) {
    check_dims(height, width, channels);
    if (data_.size() != static_cast<std::size_t>(height) * width * channels)
        throw ValidationError("image data length " + std::to_string(data_.size()) + " does not match " +
                              std::to_string(width) + "x" + std::to_string(height) + "x" +
                              std::to_string(channels));
    for (std::size_t i = 0; i < data_.size(); ++i) {
        double v = data_[i];
        if (!(v >= 0.0 && v <= 1.0))
            throw ValidationError("image sample " + std::to_string(i) + " out of [0,1]: " + std::to_string(v));
    }
}

Image image_from_clamped(int height, int width, int channels, std::vector<double> planar) {
    for (double& v : planar) v = std::clamp(v, 0.0, 1.0);
    return Image(height, width, channels, std::move(planar));
}

std::uint8_t quantize_sample(double v) {
    long q = std::lround(v * 255.0);
    return static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
}

Image read_ppm(std::span<const std::uint8_t> bytes) {
    HeaderReader reader(bytes);
    std::string magic = reader.token("magic");
    int channels = 0;
    if (magic == "P6")
        channels = 3;
    else if (magic == "P5")
        channels = 1;
    else
        throw ParseError("ppm: invalid header field 'magic': '" + magic + "'");
    int width = reader.number("width");
    int height = reader.number("height");
    int maxval = reader.number("maxval");
    if (width <= 0) throw ParseError("ppm: invalid header field 'width': 0");
    if (height <= 0) throw ParseError("ppm: invalid header field 'height': 0");
    if (maxval != 255) throw ParseError("ppm: unsupported header field 'maxval': " + std::to_string(maxval));
    reader.single_space("maxval");

    const std::size_t pixels = static_cast<std::size_t>(width) * height;
    const std::size_t need = pixels * channels;
    if (bytes.size() - reader.pos() < need)
        throw ParseError("ppm: truncated pixel data: need " + std::to_string(need) + " bytes, have " +
                         std::to_string(bytes.size() - reader.pos()));

    std::vector<double> planar(need);
    const std::uint8_t* src = bytes.data() + reader.pos();
    for (std::size_t i = 0; i < pixels; ++i)
        for (int c = 0; c < channels; ++c)
            planar[c * pixels + i] = src[i * channels + c] / 255.0;
    return Image(height, width, channels, std::move(planar));
}

std::vector<std::uint8_t> write_ppm(const Image& img) {
    const int channels = img.channels();
    std::string header = (channels == 3 ? "P6\n" : "P5\n") + std::to_string(img.width()) + " " +
                         std::to_string(img.height()) + "\n255\n";
    const std::size_t pixels = static_cast<std::size_t>(img.width()) * img.height();
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + pixels * channels);
    auto data = img.data();
    for (std::size_t i = 0; i < pixels; ++i)
        for (int c = 0; c < channels; ++c) out.push_back(quantize_sample(data[c * pixels + i]));
    return out;
}

Image crop(const Image& img, int x0, int y0, int w, int h) {
    if (x0 < 0 || y0 < 0 || w <= 0 || h <= 0 || x0 + w > img.width() || y0 + h > img.height())
        throw BoundsError("crop window (" + std::to_string(x0) + "," + std::to_string(y0) + "," +
                          std::to_string(w) + "," + std::to_string(h) + ") outside " +
                          std::to_string(img.width()) + "x" + std::to_string(img.height()));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(w) * h * img.channels());
    for (int c = 0; c < img.channels(); ++c)
        for (int y = y0; y < y0 + h; ++y) {
            auto row = img.plane(c).subspan(static_cast<std::size_t>(y) * img.width() + x0, w);
            out.insert(out.end(), row.begin(), row.end());
        }
    return Image(h, w, img.channels(), std::move(out));
}

Image to_rgb(const Image& img) {
    if (img.channels() == 3) return img;
    std::vector<double> out;
    out.reserve(img.size() * 3);
    for (int c = 0; c < 3; ++c) out.insert(out.end(), img.data().begin(), img.data().end());
    return Image(img.height(), img.width(), 3, std::move(out));
}

Image read_ppm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return read_ppm(bytes);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_ppm_file(const std::string& path, const Image& img) {
    auto bytes = write_ppm(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace glyphguide
