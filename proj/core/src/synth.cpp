#include "glyphguide/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "glyphguide/errors.hpp"
#include "glyphguide/guidance.hpp"
#include "glyphguide/random.hpp"

namespace glyphguide {

namespace {

constexpr std::array<const char*, 48> kLexicon = {
    "OPEN",  "EXIT",   "STOP",   "SALE",    "CAFE",   "HOTEL", "PARK",    "BANK",   "TAXI",   "BUS",
    "NO",    "UP",     "GO",     "ON",      "Main",   "North", "Street",  "Avenue", "Market", "Bakery",
    "Books", "Fresh",  "Pizza",  "Coffee",  "Daily",  "Menu",  "Prices",  "Today",  "Free",   "Wifi",
    "Sushi", "Garden", "Museum", "Station", "Parking","Police","Pharmacy","Grocery","24h",    "No.7",
    "Rd",    "St",     "Ave",    "Closed",  "Welcome","Ticket","Gate 3",  "Level"};

constexpr std::array<double, 4> kAngles = {0.0, 15.0, -15.0, 90.0};
constexpr int kMargin = 2;
constexpr int kAttemptsPerWord = 60;

double background(const std::array<double, 12>& k, double x, double y) {
    double v = k[0] + k[1] * x + k[2] * y;
    for (int i = 0; i < 3; ++i)
        v += k[3 + 3 * i] * std::sin(2.0 * std::numbers::pi * (k[4 + 3 * i] * x + k[5 + 3 * i] * y) + i);
    return std::clamp(v, 0.05, 0.95);
}

std::vector<double> make_background(Rng& rng, int h, int w) {
    std::vector<double> planar(static_cast<std::size_t>(3) * h * w);
    for (int c = 0; c < 3; ++c) {
        std::array<double, 12> k{};
        k[0] = rng.uniform(0.25, 0.75);
        k[1] = rng.uniform(-0.2, 0.2);
        k[2] = rng.uniform(-0.2, 0.2);
        for (int i = 0; i < 3; ++i) {
            k[3 + 3 * i] = rng.uniform(0.0, 0.04);
            k[4 + 3 * i] = rng.uniform(-3.0, 3.0);
            k[5 + 3 * i] = rng.uniform(-3.0, 3.0);
        }
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                planar[(static_cast<std::size_t>(c) * h + y) * w + x] =
                    background(k, (x + 0.5) / w - 0.5, (y + 0.5) / h - 0.5);
    }
    return planar;
}

Mask dilate(const Mask& m, int r) {
    Mask out(m.height, m.width);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            if (!m.at(y, x)) continue;
            for (int yy = std::max(0, y - r); yy <= std::min(m.height - 1, y + r); ++yy)
                for (int xx = std::max(0, x - r); xx <= std::min(m.width - 1, x + r); ++xx) out.at(yy, xx) = 1;
        }
    return out;
}

// Candidate box for a word, or nothing if it cannot fit.
std::optional<Polygon> propose(Rng& rng, const SynthConfig& cfg, double long_side, double short_side,
                               double theta) {
    const Point u = cos_sin_degrees(theta);
    const double hx = (std::abs(long_side * u.x) + std::abs(short_side * u.y)) / 2;
    const double hy = (std::abs(long_side * u.y) + std::abs(short_side * u.x)) / 2;
    const double lo_x = hx + kMargin, hi_x = cfg.width - hx - kMargin;
    const double lo_y = hy + kMargin, hi_y = cfg.height - hy - kMargin;
    if (lo_x > hi_x || lo_y > hi_y) return std::nullopt;
    OrientedRect r;
    r.long_side = long_side;
    r.short_side = short_side;
    r.theta = theta;
    // Integer extents for axis-aligned words keep their corners on the grid.
    if (theta == 0.0 || theta == 90.0) {
        const int x0 = rng.integer(static_cast<int>(std::ceil(lo_x - hx)), static_cast<int>(std::floor(hi_x - hx)));
        const int y0 = rng.integer(static_cast<int>(std::ceil(lo_y - hy)), static_cast<int>(std::floor(hi_y - hy)));
        r.center = {x0 + hx, y0 + hy};
    } else {
        r.center = {rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)};
    }
    std::vector<Point> corners = r.corners();
    for (Point& p : corners) p = {std::round(p.x), std::round(p.y)};
    return Polygon(std::move(corners));
}

}  // namespace

std::span<const char* const> synth_lexicon() { return kLexicon; }

SynthScene synth_scene(std::uint64_t seed, const SynthConfig& cfg) {
    if (cfg.width < 32 || cfg.height < 32) throw ValidationError("synth: canvas must be at least 32x32");
    if (cfg.min_words < 0 || cfg.max_words < cfg.min_words) throw ValidationError("synth: bad word count range");
    if (cfg.min_cell < 1 || cfg.max_cell < cfg.min_cell) throw ValidationError("synth: bad cell size range");

    Rng rng(seed);
    std::vector<double> planar = make_background(rng, cfg.height, cfg.width);
    const auto plane = static_cast<std::size_t>(cfg.height) * cfg.width;

    SynthScene scene;
    scene.annotations.image_width = static_cast<std::uint32_t>(cfg.width);
    scene.annotations.image_height = static_cast<std::uint32_t>(cfg.height);
    Mask occupied(cfg.height, cfg.width);

    const int words = rng.integer(cfg.min_words, cfg.max_words);
    for (int w = 0; w < words; ++w) {
        for (int attempt = 0; attempt < kAttemptsPerWord; ++attempt) {
            const std::string text = kLexicon[static_cast<std::size_t>(rng.integer(0, kLexicon.size() - 1))];
            const int cell = rng.integer(cfg.min_cell, cfg.max_cell);
            const double theta = kAngles[static_cast<std::size_t>(rng.integer(0, kAngles.size() - 1))];
            const auto n = static_cast<double>(text.size());
            auto poly = propose(rng, cfg, n * cell, cell, theta);
            if (!poly) continue;

            const Mask box = rasterize_mask(std::span<const Polygon>(&*poly, 1), cfg.height, cfg.width);
            bool clash = false;
            for (std::size_t i = 0; i < plane && !clash; ++i) clash = box.bits[i] && occupied.bits[i];
            if (clash) continue;

            AuxPayload single{scene.annotations.image_width, scene.annotations.image_height, {{*poly, text}}};
            const Mask glyphs = render_guidance(single, cfg.height, cfg.width).glyphs();
            if (glyphs.count() == 0) continue;

            double luminance = 0.0;
            std::size_t inside = 0;
            for (std::size_t i = 0; i < plane; ++i)
                if (box.bits[i]) {
                    luminance += (planar[i] + planar[plane + i] + planar[2 * plane + i]) / 3.0;
                    ++inside;
                }
            const bool dark = inside == 0 || luminance / static_cast<double>(inside) > 0.5;
            std::array<double, 3> ink{};
            for (double& v : ink) v = dark ? rng.uniform(0.0, 0.15) : rng.uniform(0.85, 1.0);
            for (std::size_t i = 0; i < plane; ++i)
                if (glyphs.bits[i])
                    for (std::size_t c = 0; c < 3; ++c) planar[c * plane + i] = ink[c];

            const Mask grown = dilate(box, kMargin);
            for (std::size_t i = 0; i < plane; ++i) occupied.bits[i] |= grown.bits[i];
            scene.annotations.records.push_back({std::move(*poly), text});
            break;
        }
    }
    scene.image = Image(cfg.height, cfg.width, 3, std::move(planar));
    return scene;
}

std::vector<SynthScene> synth_dataset(int n, std::uint64_t seed, const SynthConfig& cfg) {
    if (n < 1) throw ValidationError("synth: scene count must be at least 1");
    std::vector<SynthScene> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(synth_scene(Rng::derive(seed, static_cast<std::uint64_t>(i)), cfg));
    return out;
}

std::uint64_t hash_scene(const SynthScene& scene, std::uint64_t h) {
    const auto mix = [&h](const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    const int dims[3] = {scene.image.height(), scene.image.width(), scene.image.channels()};
    mix(dims, sizeof dims);
    mix(scene.image.data().data(), scene.image.data().size_bytes());
    const std::vector<std::uint8_t> aux = encode_aux(scene.annotations);
    mix(aux.data(), aux.size());
    return h;
}

std::uint64_t hash_dataset(const std::vector<SynthScene>& scenes) {
    std::uint64_t h = 14695981039346656037ull;
    for (const SynthScene& s : scenes) h = hash_scene(s, h);
    return h;
}

}  // namespace glyphguide
