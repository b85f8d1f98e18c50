#include "glyphguide/guidance.hpp"

#include <algorithm>
#include <cmath>

#include "glyphguide/errors.hpp"
#include "glyphguide/utf8.hpp"

namespace glyphguide {

Image GuidanceMap::to_image() const {
    const std::size_t plane = glyphs_.bits.size();
    std::vector<double> data(plane * 3);
    for (std::size_t i = 0; i < plane; ++i) data[i] = glyphs_.bits[i] ? 1.0 : 0.0;
    std::copy_n(data.begin(), plane, data.begin() + plane);
    std::copy_n(data.begin(), plane, data.begin() + 2 * plane);
    return Image(height(), width(), 3, std::move(data));
}

Bitmap render_word_horizontal(std::string_view text, double box_long, double box_short) {
    auto decoded = decode_utf8(text);
    if (!decoded) throw ValidationError("render: text is not valid UTF-8");
    if (decoded->empty()) throw ValidationError("render: text is empty");
    const auto& cps = *decoded;
    const double n = static_cast<double>(cps.size());

    int cw = std::max(1, static_cast<int>(std::lround(box_long)));
    int ch = std::max(1, static_cast<int>(std::lround(box_short)));
    double scale = std::min(box_long / (8.0 * n), box_short / 8.0);
    scale = std::max(scale, 1.0 / 8.0);

    Bitmap out(ch, cw);
    const double off_x = (cw - 8.0 * n * scale) / 2.0;
    const double off_y = (ch - 8.0 * scale) / 2.0;
    const auto text_w = static_cast<long>(8 * cps.size());
    for (int y = 0; y < ch; ++y) {
        double v = (y + 0.5 - off_y) / scale;
        if (v < 0.0 || v >= 8.0) continue;
        int gy = static_cast<int>(v);
        for (int x = 0; x < cw; ++x) {
            double u = (x + 0.5 - off_x) / scale;
            if (u < 0.0) continue;
            long col = static_cast<long>(u);
            if (col >= text_w) break;
            if (GlyphFont::bit(cps[col / 8], static_cast<int>(col % 8), gy)) out.at(y, x) = 1;
        }
    }
    return out;
}

void place_rotated(GuidanceMap& canvas, const Bitmap& bitmap, const OrientedRect& rect) {
    const Point cs = cos_sin_degrees(rect.theta);
    const double c = cs.x, s = cs.y;
    const double half_w = bitmap.width / 2.0, half_h = bitmap.height / 2.0;

    // Canvas-space bounding box of the rotated bitmap.
    double ex = std::abs(c) * half_w + std::abs(s) * half_h;
    double ey = std::abs(s) * half_w + std::abs(c) * half_h;
    int x0 = std::max(0, static_cast<int>(std::floor(rect.center.x - ex)) - 1);
    int x1 = std::min(canvas.width() - 1, static_cast<int>(std::ceil(rect.center.x + ex)) + 1);
    int y0 = std::max(0, static_cast<int>(std::floor(rect.center.y - ey)) - 1);
    int y1 = std::min(canvas.height() - 1, static_cast<int>(std::ceil(rect.center.y + ey)) + 1);

    Mask& out = canvas.glyphs();
    for (int y = y0; y <= y1; ++y) {
        const double dy = y + 0.5 - rect.center.y;
        for (int x = x0; x <= x1; ++x) {
            const double dx = x + 0.5 - rect.center.x;
            // Inverse rotation into the horizontal bitmap frame.
            double bx = dx * c + dy * s + half_w;
            double by = -dx * s + dy * c + half_h;
            if (bx < 0.0 || by < 0.0 || bx >= bitmap.width || by >= bitmap.height) continue;
            if (bitmap.at(static_cast<int>(by), static_cast<int>(bx))) out.at(y, x) = 1;
        }
    }
}

GuidanceMap render_guidance(const AuxPayload& payload, int height, int width) {
    GuidanceMap map(height, width);
    for (const AuxRecord& r : payload.records) {
        OrientedRect rect = min_area_rect(r.polygon);
        double theta = principal_angle(rect);
        OrientedRect placed = rect;
        if (theta != rect.theta) std::swap(placed.long_side, placed.short_side);
        placed.theta = theta;
        Bitmap word = render_word_horizontal(r.text, placed.long_side, placed.short_side);
        place_rotated(map, word, placed);
    }
    return map;
}

}  // namespace glyphguide
