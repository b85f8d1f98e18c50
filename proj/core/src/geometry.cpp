#include "glyphguide/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "glyphguide/errors.hpp"
#include "glyphguide/utf8.hpp"

namespace glyphguide {

namespace {

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Unit vector along e; axis-aligned directions are produced exactly.
Point unit(Point e) {
    if (e.y == 0.0) return {e.x > 0 ? 1.0 : -1.0, 0.0};
    if (e.x == 0.0) return {0.0, e.y > 0 ? 1.0 : -1.0};
    double len = std::hypot(e.x, e.y);
    return {e.x / len, e.y / len};
}

double direction_degrees(Point u) {
    if (u.y == 0.0) return 0.0;
    if (u.x == 0.0) return 90.0;
    return normalize_half_turn(std::atan2(u.y, u.x) * 180.0 / std::numbers::pi);
}

}  // namespace

Polygon::Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3)
        throw ValidationError("polygon needs at least 3 vertices, got " + std::to_string(vertices_.size()));
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const Point& a = vertices_[i];
        const Point& b = vertices_[(i + 1) % vertices_.size()];
        if (!std::isfinite(a.x) || !std::isfinite(a.y))
            throw ValidationError("polygon vertex " + std::to_string(i) + " is not finite");
        if (a == b) throw ValidationError("polygon has duplicate consecutive vertex at index " + std::to_string(i));
    }
    if (signed_area() == 0.0) throw ValidationError("polygon is degenerate (zero area)");
}

double Polygon::signed_area() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const Point& a = vertices_[i];
        const Point& b = vertices_[(i + 1) % vertices_.size()];
        sum += a.x * b.y - b.x * a.y;
    }
    return 0.5 * sum;
}

std::vector<Point> OrientedRect::corners() const {
    Point u = cos_sin_degrees(theta);
    Point n{-u.y, u.x};
    double hl = long_side / 2, hs = short_side / 2;
    return {
        {center.x - u.x * hl - n.x * hs, center.y - u.y * hl - n.y * hs},
        {center.x + u.x * hl - n.x * hs, center.y + u.y * hl - n.y * hs},
        {center.x + u.x * hl + n.x * hs, center.y + u.y * hl + n.y * hs},
        {center.x - u.x * hl + n.x * hs, center.y - u.y * hl + n.y * hs},
    };
}

std::size_t Mask::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

double polygon_area(const Polygon& p) { return std::abs(p.signed_area()); }

double avg_char_area(const Polygon& p, std::string_view text) {
    std::size_t n = count_chars_excluding_spaces(text);
    if (n == 0) throw ValidationError("text has no characters");
    return polygon_area(p) / static_cast<double>(n);
}

Polygon convex_hull(std::span<const Point> points) {
    std::vector<Point> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) throw ValidationError("convex hull: fewer than 3 distinct points");

    // Andrew's monotone chain; `<= 0` drops collinear points.
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const Point& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) throw ValidationError("convex hull: all points are collinear");
    return Polygon(std::move(hull));
}

Polygon convex_hull(const Polygon& p) { return convex_hull(p.vertices()); }

OrientedRect min_area_rect(std::span<const Point> points) {
    Polygon hull = convex_hull(points);
    auto h = hull.vertices();

    double best_area = std::numeric_limits<double>::infinity();
    OrientedRect best;
    for (std::size_t i = 0; i < h.size(); ++i) {
        Point a = h[i], b = h[(i + 1) % h.size()];
        Point u = unit({b.x - a.x, b.y - a.y});
        Point n{-u.y, u.x};
        double amin = std::numeric_limits<double>::infinity(), amax = -amin;
        double bmin = amin, bmax = -amin;
        for (const Point& p : h) {
            double pa = p.x * u.x + p.y * u.y;
            double pb = p.x * n.x + p.y * n.y;
            amin = std::min(amin, pa);
            amax = std::max(amax, pa);
            bmin = std::min(bmin, pb);
            bmax = std::max(bmax, pb);
        }
        double wu = amax - amin, wn = bmax - bmin;
        double area = wu * wn;
        if (area < best_area) {
            best_area = area;
            double ca = 0.5 * (amin + amax), cb = 0.5 * (bmin + bmax);
            best.center = {u.x * ca + n.x * cb, u.y * ca + n.y * cb};
            if (wu >= wn) {
                best.long_side = wu;
                best.short_side = wn;
                best.theta = direction_degrees(u);
            } else {
                best.long_side = wn;
                best.short_side = wu;
                best.theta = direction_degrees(n);
            }
        }
    }
    return best;
}

OrientedRect min_area_rect(const Polygon& p) { return min_area_rect(p.vertices()); }

double principal_angle(const OrientedRect& r) {
    if (r.short_side > 0 && r.long_side / r.short_side < 1.05) {
        double other = normalize_half_turn(r.theta + 90.0);
        if (std::abs(other) < std::abs(r.theta)) return other;
    }
    return r.theta;
}

Point cos_sin_degrees(double degrees) {
    double q = degrees / 90.0;
    if (q == std::floor(q)) {
        static constexpr Point kQuarter[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        long k = static_cast<long>(q) % 4;
        if (k < 0) k += 4;
        return kQuarter[k];
    }
    double rad = degrees * std::numbers::pi / 180.0;
    return {std::cos(rad), std::sin(rad)};
}

double normalize_half_turn(double degrees) {
    double t = std::fmod(degrees, 180.0);
    if (t <= -90.0) t += 180.0;
    if (t > 90.0) t -= 180.0;
    return t;
}

bool contains(const Polygon& p, Point q) {
    auto v = p.vertices();
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i].y > q.y) != (v[j].y > q.y)) {
            double x = v[j].x + (q.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
            if (q.x < x) inside = !inside;
        }
    }
    return inside;
}

Mask rasterize_mask(std::span<const Polygon> polys, int height, int width) {
    if (height <= 0 || width <= 0) throw ValidationError("mask dimensions must be positive");
    Mask mask(height, width);
    for (const Polygon& p : polys) {
        double xmin = p.vertices()[0].x, xmax = xmin, ymin = p.vertices()[0].y, ymax = ymin;
        for (const Point& q : p.vertices()) {
            xmin = std::min(xmin, q.x);
            xmax = std::max(xmax, q.x);
            ymin = std::min(ymin, q.y);
            ymax = std::max(ymax, q.y);
        }
        int x0 = std::max(0, static_cast<int>(std::floor(xmin - 0.5)));
        int x1 = std::min(width - 1, static_cast<int>(std::ceil(xmax)));
        int y0 = std::max(0, static_cast<int>(std::floor(ymin - 0.5)));
        int y1 = std::min(height - 1, static_cast<int>(std::ceil(ymax)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
                if (!mask.at(y, x) && contains(p, {x + 0.5, y + 0.5})) mask.at(y, x) = 1;
    }
    return mask;
}

}  // namespace glyphguide
