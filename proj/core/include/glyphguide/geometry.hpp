#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace glyphguide {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Simple polygon in pixel coordinates (x right, y down).
///
/// Invariants: at least three vertices, no two consecutive vertices equal
/// (the closing edge included), non-zero signed area.
class Polygon {
public:
    explicit Polygon(std::vector<Point> vertices);

    std::span<const Point> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }

    /// Shoelace sum; positive for counter-clockwise order in a y-up frame.
    double signed_area() const;

    friend bool operator==(const Polygon&, const Polygon&) = default;

private:
    std::vector<Point> vertices_;
};

/// Rectangle with `theta` in degrees, the angle from the +x axis to the long
/// side, normalized to (-90, 90]. Angles follow image coordinates, so a
/// positive theta turns the long side towards +y.
struct OrientedRect {
    Point center;
    double long_side = 0.0;
    double short_side = 0.0;
    double theta = 0.0;

    double area() const { return long_side * short_side; }
    /// Corners in order: start of long side, along long side, opposite, back.
    std::vector<Point> corners() const;
};

/// Binary raster, one byte per pixel (0 or 1), row-major.
struct Mask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> bits;

    Mask() = default;
    Mask(int h, int w, std::uint8_t fill = 0)
        : height(h), width(w), bits(static_cast<std::size_t>(h) * w, fill) {}

    std::uint8_t at(int y, int x) const { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int y, int x) { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::size_t count() const;

    friend bool operator==(const Mask&, const Mask&) = default;
};

double polygon_area(const Polygon& p);

/// Area per character; characters are Unicode scalar values other than U+0020.
double avg_char_area(const Polygon& p, std::string_view text);

/// Counter-clockwise hull (y-up orientation) without collinear vertices.
/// Throws ValidationError if every point is collinear.
Polygon convex_hull(std::span<const Point> points);
Polygon convex_hull(const Polygon& p);

/// Minimum-area enclosing rectangle via rotating calipers over hull edges.
OrientedRect min_area_rect(std::span<const Point> points);
OrientedRect min_area_rect(const Polygon& p);

/// Text direction of a box. For near-square boxes (long/short < 1.05) the
/// candidate edge direction with the smaller |theta| wins.
double principal_angle(const OrientedRect& r);

/// cos/sin of an angle in degrees; exact at multiples of 90.
Point cos_sin_degrees(double degrees);

/// Normalizes degrees into (-90, 90].
double normalize_half_turn(double degrees);

/// Pixel (x, y) is set iff its center (x + 0.5, y + 0.5) lies strictly inside
/// some polygon under the even-odd rule.
Mask rasterize_mask(std::span<const Polygon> polys, int height, int width);

/// Even-odd containment test.
bool contains(const Polygon& p, Point q);

}  // namespace glyphguide
