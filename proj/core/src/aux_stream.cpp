#include "glyphguide/aux_stream.hpp"

#include <algorithm>
#include <zlib.h>

#include <cmath>
#include <string>

#include "glyphguide/byte_io.hpp"
#include "glyphguide/errors.hpp"
#include "glyphguide/utf8.hpp"

namespace glyphguide {

namespace {

constexpr std::uint8_t kMagic[4] = {'T', 'B', 'A', 'X'};
constexpr std::uint8_t kVersion = 0x01;
constexpr std::uint64_t kMaxCoord = 65535;
constexpr std::size_t kMaxTextBytes = 255;
constexpr std::size_t kHeaderBytes = 9;

std::vector<std::uint8_t> deflate_raw(std::span<const std::uint8_t> in) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
        throw Error("deflateInit2 failed");
    std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(in.size())));
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw Error("deflate failed");
    out.resize(zs.total_out);
    return out;
}

std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> in) {
    z_stream zs{};
    if (inflateInit2(&zs, -15) != Z_OK) throw DecodeError("inflateInit2 failed");
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    std::vector<std::uint8_t> out;
    std::uint8_t chunk[4096];
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = chunk;
        zs.avail_out = sizeof chunk;
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw DecodeError("compressed body is corrupt or truncated");
        }
        out.insert(out.end(), chunk, chunk + (sizeof chunk - zs.avail_out));
        if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
            inflateEnd(&zs);
            throw DecodeError("compressed body is truncated");
        }
    }
    bool trailing = zs.avail_in != 0;
    inflateEnd(&zs);
    if (trailing) throw DecodeError("trailing bytes after compressed body");
    return out;
}

bool is_integer_coord(double v) { return v >= 0.0 && v <= static_cast<double>(kMaxCoord) && v == std::floor(v); }

}  // namespace

void validate(const AuxRecord& record) {
    for (std::size_t i = 0; i < record.polygon.size(); ++i) {
        const Point& p = record.polygon.vertices()[i];
        if (!is_integer_coord(p.x) || !is_integer_coord(p.y))
            throw ValidationError("aux record vertex " + std::to_string(i) +
                                  " must be an integer in [0, 65535]");
    }
    if (record.text.empty()) throw ValidationError("aux record text is empty");
    if (record.text.size() > kMaxTextBytes)
        throw ValidationError("aux record text exceeds 255 bytes (" + std::to_string(record.text.size()) + ")");
    if (!is_valid_utf8(record.text)) throw ValidationError("aux record text is not valid UTF-8");
}

void validate(const AuxPayload& payload) {
    if (payload.image_width == 0 || payload.image_height == 0)
        throw ValidationError("aux payload image dimensions must be positive");
    for (std::size_t i = 0; i < payload.records.size(); ++i) {
        try {
            validate(payload.records[i]);
        } catch (const ValidationError& e) {
            throw ValidationError("record " + std::to_string(i) + ": " + e.what());
        }
    }
}

AuxPayload filter_records(const AuxPayload& payload, const FilterConfig& cfg) {
    if (!(cfg.threshold > 0.0)) throw ValidationError("filter threshold must be positive");
    AuxPayload out{payload.image_width, payload.image_height, {}};
    for (const AuxRecord& r : payload.records) {
        if (count_chars_excluding_spaces(r.text) == 0) continue;
        if (avg_char_area(r.polygon, r.text) <= cfg.threshold) out.records.push_back(r);
    }
    return out;
}

std::vector<std::uint8_t> serialize_aux_body(const AuxPayload& payload) {
    validate(payload);
    std::vector<std::uint8_t> body;
    bytes::put_varint(body, payload.image_width);
    bytes::put_varint(body, payload.image_height);
    bytes::put_varint(body, payload.records.size());
    for (const AuxRecord& r : payload.records) {
        auto v = r.polygon.vertices();
        bytes::put_varint(body, v.size());
        auto px = static_cast<std::int64_t>(v[0].x), py = static_cast<std::int64_t>(v[0].y);
        bytes::put_varint(body, static_cast<std::uint64_t>(px));
        bytes::put_varint(body, static_cast<std::uint64_t>(py));
        for (std::size_t i = 1; i < v.size(); ++i) {
            auto x = static_cast<std::int64_t>(v[i].x), y = static_cast<std::int64_t>(v[i].y);
            bytes::put_varint(body, bytes::zigzag(x - px));
            bytes::put_varint(body, bytes::zigzag(y - py));
            px = x;
            py = y;
        }
        bytes::put_varint(body, r.text.size());
        body.insert(body.end(), r.text.begin(), r.text.end());
    }
    return body;
}

std::vector<std::uint8_t> encode_aux(const AuxPayload& payload) {
    auto body = serialize_aux_body(payload);
    auto compressed = deflate_raw(body);
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    out.push_back(kVersion);
    bytes::put_u32(out, static_cast<std::uint32_t>(compressed.size()));
    out.insert(out.end(), compressed.begin(), compressed.end());
    return out;
}

AuxPayload decode_aux(std::span<const std::uint8_t> data) {
    if (data.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), data.begin()))
        throw DecodeError("bad magic");
    bytes::Reader header(data.subspan(4));
    if (header.u8("version") != kVersion) throw DecodeError("unsupported version");
    std::uint32_t clen = header.u32("compressed length");
    if (data.size() - kHeaderBytes < clen) throw DecodeError("truncated stream reading compressed body");
    if (data.size() - kHeaderBytes > clen) throw DecodeError("trailing bytes after compressed body");

    auto body = inflate_raw(data.subspan(kHeaderBytes));
    bytes::Reader in(body);

    auto dim = [&](const char* field) {
        std::uint64_t v = in.varint(field);
        if (v == 0 || v > 0xFFFFFFFFu) throw DecodeError(std::string("invalid ") + field);
        return static_cast<std::uint32_t>(v);
    };
    AuxPayload out;
    out.image_width = dim("image width");
    out.image_height = dim("image height");
    std::uint64_t n = in.varint("record count");
    // Each record needs at least 8 body bytes; reject counts the body cannot hold.
    if (n > body.size()) throw DecodeError("invalid record count");
    out.records.reserve(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::string field = "record[" + std::to_string(i) + "]";
        std::uint64_t nv = in.varint(field + ".vertex count");
        if (nv < 3 || nv > in.remaining()) throw DecodeError("invalid " + field + ".vertex count");
        std::vector<Point> verts;
        verts.reserve(static_cast<std::size_t>(nv));
        auto coord = [&](std::int64_t v, const std::string& f) {
            if (v < 0 || v > static_cast<std::int64_t>(kMaxCoord)) throw DecodeError(f + " out of range");
            return v;
        };
        std::uint64_t x0 = in.varint(field + ".x"), y0 = in.varint(field + ".y");
        if (x0 > kMaxCoord || y0 > kMaxCoord) throw DecodeError(field + ".vertex out of range");
        auto px = static_cast<std::int64_t>(x0), py = static_cast<std::int64_t>(y0);
        verts.push_back({static_cast<double>(px), static_cast<double>(py)});
        for (std::uint64_t k = 1; k < nv; ++k) {
            px = coord(px + bytes::unzigzag(in.varint(field + ".dx")), field + ".x");
            py = coord(py + bytes::unzigzag(in.varint(field + ".dy")), field + ".y");
            verts.push_back({static_cast<double>(px), static_cast<double>(py)});
        }
        std::uint64_t len = in.varint(field + ".text length");
        if (len == 0 || len > kMaxTextBytes) throw DecodeError("invalid " + field + ".text length");
        auto text_bytes = in.take(static_cast<std::size_t>(len), field + ".text");
        std::string text(text_bytes.begin(), text_bytes.end());
        if (!is_valid_utf8(text)) throw DecodeError("invalid UTF-8 in " + field + ".text");
        try {
            out.records.push_back({Polygon(std::move(verts)), std::move(text)});
        } catch (const ValidationError& e) {
            throw DecodeError("invalid " + field + ".polygon: " + e.what());
        }
    }
    if (!in.done()) throw DecodeError("trailing bytes in body");
    return out;
}

double aux_bpp(std::size_t byte_count, int height, int width) {
    if (height <= 0 || width <= 0) throw ValidationError("aux_bpp: image dimensions must be positive");
    return 8.0 * static_cast<double>(byte_count) / (static_cast<double>(height) * width);
}

std::vector<std::uint8_t> transmit_aux(const AuxPayload& kept) {
    if (kept.records.empty()) return {};
    return encode_aux(kept);
}

AuxPayload receive_aux(std::span<const std::uint8_t> bytes, std::uint32_t width, std::uint32_t height) {
    if (bytes.empty()) return AuxPayload{width, height, {}};
    return decode_aux(bytes);
}

}  // namespace glyphguide
