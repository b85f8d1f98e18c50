#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "glyphguide/geometry.hpp"

namespace glyphguide {

/// One OCR word: box polygon with integer vertices in [0, 65535] plus its
/// UTF-8 transcript (1..255 bytes).
struct AuxRecord {
    Polygon polygon;
    std::string text;

    friend bool operator==(const AuxRecord&, const AuxRecord&) = default;
};

struct AuxPayload {
    std::uint32_t image_width = 0;
    std::uint32_t image_height = 0;
    std::vector<AuxRecord> records;

    friend bool operator==(const AuxPayload&, const AuxPayload&) = default;
};

/// Keep-rule threshold T in px^2 per character.
struct FilterConfig {
    double threshold = 150.0;
};

inline constexpr double kTrainThreshold = 150.0;
inline constexpr double kTestThreshold = 800.0;

/// Throws ValidationError describing the first violated invariant.
void validate(const AuxRecord& record);
void validate(const AuxPayload& payload);

/// Keeps records with avg_char_area <= threshold, preserving order. Records
/// whose transcript has no countable characters are dropped.
AuxPayload filter_records(const AuxPayload& payload, const FilterConfig& cfg);

/// TBAX v1 container:
///
///   "TBAX" | 0x01 | u32le compressed_length | raw DEFLATE(body)
///
/// where body is varint(W) varint(H) varint(N) followed by N records of
/// varint(V), first vertex as two varints, V-1 zigzag-delta vertex pairs,
/// varint(text_bytes), text bytes. Varints are unsigned LEB128.
std::vector<std::uint8_t> encode_aux(const AuxPayload& payload);

/// Inverse of encode_aux; all-or-nothing. Throws DecodeError naming the
/// failing field.
AuxPayload decode_aux(std::span<const std::uint8_t> bytes);

/// Bytes actually sent alongside an image: nothing when no record survives
/// filtering, otherwise encode_aux(kept).
std::vector<std::uint8_t> transmit_aux(const AuxPayload& kept);
/// Inverse of transmit_aux; an empty stream is an empty payload.
AuxPayload receive_aux(std::span<const std::uint8_t> bytes, std::uint32_t width, std::uint32_t height);

double aux_bpp(std::size_t byte_count, int height, int width);
inline double aux_bpp(std::span<const std::uint8_t> bytes, int height, int width) {
    return aux_bpp(bytes.size(), height, width);
}

/// Serialized body before compression; exposed for size accounting tests.
std::vector<std::uint8_t> serialize_aux_body(const AuxPayload& payload);

}  // namespace glyphguide
