#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "glyphguide/aux_stream.hpp"
#include "glyphguide/geometry.hpp"
#include "glyphguide/image.hpp"

namespace glyphguide {

/// Embedded 8x8 monospace bitmap font covering printable ASCII. Anything
/// else maps to a block glyph with ~80% of its pixels set.
struct GlyphFont {
    static bool supports(char32_t cp);
    /// Eight rows, top first; bit k of a row is column k from the left.
    static std::span<const std::uint8_t, 8> rows(char32_t cp);
    static bool bit(char32_t cp, int x, int y) { return (rows(cp)[y] >> x) & 1; }
};

/// Binary raster; same layout as Mask.
using Bitmap = Mask;

/// White-on-black glyph raster aligned with an image. Stored as a binary
/// mask and exposed as a 3-channel Image with samples in {0, 1}.
class GuidanceMap {
public:
    GuidanceMap(int height, int width) : glyphs_(height, width) {}

    int height() const { return glyphs_.height; }
    int width() const { return glyphs_.width; }
    const Mask& glyphs() const { return glyphs_; }
    Mask& glyphs() { return glyphs_; }

    Image to_image() const;

    friend bool operator==(const GuidanceMap&, const GuidanceMap&) = default;

private:
    Mask glyphs_;
};

/// Lays `text` out left to right, centered in a round(box_long) x
/// round(box_short) canvas. One font pixel spans
/// s = min(box_long / (8 * n), box_short / 8) canvas pixels (n = code points),
/// floored so a glyph cell is never smaller than one pixel. Nearest-neighbor.
Bitmap render_word_horizontal(std::string_view text, double box_long, double box_short);

/// Rotates `bitmap` by rect.theta about rect.center and max-composites it
/// into the canvas. Pixels outside the canvas are clipped.
void place_rotated(GuidanceMap& canvas, const Bitmap& bitmap, const OrientedRect& rect);

/// Full rendering-and-alignment pass. An empty payload yields an all-zero map.
GuidanceMap render_guidance(const AuxPayload& payload, int height, int width);

}  // namespace glyphguide
