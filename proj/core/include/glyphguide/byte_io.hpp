#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "glyphguide/errors.hpp"

namespace glyphguide::bytes {

inline void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<std::uint8_t>(v | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint64_t zigzag(std::int64_t v) {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

inline std::int64_t unzigzag(std::uint64_t v) {
    return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

/// Bounds-checked little-endian reader; every failure names the field.
class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

    std::span<const std::uint8_t> take(std::size_t n, const std::string& field) {
        if (remaining() < n) throw DecodeError("truncated stream reading " + field);
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::uint8_t u8(const std::string& field) { return take(1, field)[0]; }

    std::uint16_t u16(const std::string& field) {
        auto s = take(2, field);
        return static_cast<std::uint16_t>(s[0] | (s[1] << 8));
    }

    std::uint32_t u32(const std::string& field) {
        auto s = take(4, field);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | s[i];
        return v;
    }

    std::uint64_t u64(const std::string& field) {
        auto s = take(8, field);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | s[i];
        return v;
    }

    double f64(const std::string& field) { return std::bit_cast<double>(u64(field)); }

    std::uint64_t varint(const std::string& field) {
        std::uint64_t v = 0;
        for (int shift = 0;; shift += 7) {
            if (shift > 63) throw DecodeError("varint overflow reading " + field);
            std::uint8_t b = u8(field);
            std::uint64_t bits = b & 0x7F;
            if (shift == 63 && bits > 1) throw DecodeError("varint overflow reading " + field);
            v |= bits << shift;
            if (!(b & 0x80)) return v;
        }
    }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace glyphguide::bytes
