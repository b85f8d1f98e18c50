#include "glyphguide/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <tuple>

#include "glyphguide/errors.hpp"

namespace glyphguide {

namespace {

void require_same_shape(const Image& a, const Image& b, const char* what) {
    if (a.height() != b.height() || a.width() != b.width() || a.channels() != b.channels())
        throw ShapeError(std::string(what) + ": image shapes differ");
}

double psnr_from_mse(double mse) { return mse == 0.0 ? kInfinitePsnr : 10.0 * std::log10(1.0 / mse); }

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;
constexpr std::array<double, 5> kScaleWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

std::array<double, kWindow> gaussian_taps() {
    std::array<double, kWindow> g{};
    double total = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - kWindow / 2;
        g[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
        total += g[static_cast<std::size_t>(i)];
    }
    for (double& v : g) v /= total;
    return g;
}

struct Plane {
    int h = 0;
    int w = 0;
    std::vector<double> v;
    double at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

// Separable valid-mode Gaussian filter.
Plane filter(const Plane& p) {
    static const auto g = gaussian_taps();
    Plane rows{p.h, p.w - kWindow + 1, {}};
    rows.v.resize(static_cast<std::size_t>(rows.h) * rows.w);
    for (int y = 0; y < rows.h; ++y)
        for (int x = 0; x < rows.w; ++x) {
            double s = 0.0;
            for (int k = 0; k < kWindow; ++k) s += g[static_cast<std::size_t>(k)] * p.at(y, x + k);
            rows.v[static_cast<std::size_t>(y) * rows.w + x] = s;
        }
    Plane out{p.h - kWindow + 1, rows.w, {}};
    out.v.resize(static_cast<std::size_t>(out.h) * out.w);
    for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x) {
            double s = 0.0;
            for (int k = 0; k < kWindow; ++k) s += g[static_cast<std::size_t>(k)] * rows.at(y + k, x);
            out.v[static_cast<std::size_t>(y) * out.w + x] = s;
        }
    return out;
}

Plane product(const Plane& a, const Plane& b) {
    Plane out{a.h, a.w, std::vector<double>(a.v.size())};
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
    return out;
}

// Mean luminance term and contrast-structure term over the valid region.
std::pair<double, double> ssim_terms(const Plane& a, const Plane& b) {
    const Plane mu_a = filter(a), mu_b = filter(b);
    const Plane aa = filter(product(a, a)), bb = filter(product(b, b)), ab = filter(product(a, b));
    double l_sum = 0.0, cs_sum = 0.0;
    for (std::size_t i = 0; i < mu_a.v.size(); ++i) {
        const double ma = mu_a.v[i], mb = mu_b.v[i];
        const double va = aa.v[i] - ma * ma, vb = bb.v[i] - mb * mb, cov = ab.v[i] - ma * mb;
        l_sum += (2.0 * ma * mb + kC1) / (ma * ma + mb * mb + kC1);
        cs_sum += (2.0 * cov + kC2) / (va + vb + kC2);
    }
    const auto n = static_cast<double>(mu_a.v.size());
    return {l_sum / n, cs_sum / n};
}

Plane downsample(const Plane& p) {
    Plane out{p.h / 2, p.w / 2, {}};
    out.v.resize(static_cast<std::size_t>(out.h) * out.w);
    for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x)
            out.v[static_cast<std::size_t>(y) * out.w + x] =
                0.25 * (p.at(2 * y, 2 * x) + p.at(2 * y, 2 * x + 1) + p.at(2 * y + 1, 2 * x) +
                        p.at(2 * y + 1, 2 * x + 1));
    return out;
}

std::string trim_ascii(const std::string& s) {
    const auto space = [](unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); };
    std::size_t b = 0, e = s.size();
    while (b < e && space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && space(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

double psnr(const Image& a, const Image& b) {
    require_same_shape(a, b, "psnr");
    if (a.empty()) throw ShapeError("psnr: empty image");
    double sse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        sse += d * d;
    }
    return psnr_from_mse(sse / static_cast<double>(a.size()));
}

double masked_psnr(const Image& a, const Image& b, const Mask& m) {
    require_same_shape(a, b, "masked_psnr");
    if (m.height != a.height() || m.width != a.width()) throw ShapeError("masked_psnr: mask size differs");
    double sse = 0.0;
    std::size_t n = 0;
    for (int c = 0; c < a.channels(); ++c)
        for (int y = 0; y < a.height(); ++y)
            for (int x = 0; x < a.width(); ++x) {
                if (!m.at(y, x)) continue;
                const double d = a.at(c, y, x) - b.at(c, y, x);
                sse += d * d;
                ++n;
            }
    return n == 0 ? kInfinitePsnr : psnr_from_mse(sse / static_cast<double>(n));
}

int ms_ssim_scales(int height, int width) {
    int scales = 0;
    int side = std::min(height, width);
    while (scales < static_cast<int>(kScaleWeights.size()) && side >= kWindow) {
        ++scales;
        side /= 2;
    }
    return scales;
}

double ms_ssim(const Image& a, const Image& b) {
    require_same_shape(a, b, "ms_ssim");
    const int scales = ms_ssim_scales(a.height(), a.width());
    if (scales == 0)
        throw ShapeError("ms_ssim: image is " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                         ", needs at least 11x11");
    double weight_total = 0.0;
    for (int s = 0; s < scales; ++s) weight_total += kScaleWeights[static_cast<std::size_t>(s)];

    double total = 0.0;
    for (int c = 0; c < a.channels(); ++c) {
        Plane pa{a.height(), a.width(), {a.plane(c).begin(), a.plane(c).end()}};
        Plane pb{b.height(), b.width(), {b.plane(c).begin(), b.plane(c).end()}};
        double value = 1.0;
        for (int s = 0; s < scales; ++s) {
            const double w = kScaleWeights[static_cast<std::size_t>(s)] / weight_total;
            auto [l, cs] = ssim_terms(pa, pb);
            value *= std::pow(std::max(cs, 0.0), w);
            if (s == scales - 1) value *= std::pow(std::max(l, 0.0), w);
            else {
                pa = downsample(pa);
                pb = downsample(pb);
            }
        }
        total += value;
    }
    return total / a.channels();
}

double iou(const Polygon& a, const Polygon& b, int height, int width) {
    const Mask ma = rasterize_mask(std::span<const Polygon>(&a, 1), height, width);
    const Mask mb = rasterize_mask(std::span<const Polygon>(&b, 1), height, width);
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < ma.bits.size(); ++i) {
        inter += ma.bits[i] & mb.bits[i];
        uni += ma.bits[i] | mb.bits[i];
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Scores make_scores(std::size_t tp, std::size_t n_pred, std::size_t n_gt) {
    Scores s;
    s.true_positives = tp;
    s.precision = n_pred == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_pred);
    s.recall = n_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_gt);
    const double d = s.precision + s.recall;
    s.f1 = d == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / d;
    return s;
}

bool transcripts_equal(const std::string& a, const std::string& b, bool strict) {
    if (strict) return a == b;
    const std::string ta = trim_ascii(a), tb = trim_ascii(b);
    return std::equal(ta.begin(), ta.end(), tb.begin(), tb.end(), [](char x, char y) {
        const auto lower = [](char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c; };
        return lower(x) == lower(y);
    });
}

F1Report f1_report(const SpottingResult& pred, const SpottingResult& gt, int height, int width,
                   const MatchConfig& cfg) {
    std::vector<Mask> pm, gm;
    for (const auto& p : pred) pm.push_back(rasterize_mask(std::span<const Polygon>(&p.polygon, 1), height, width));
    for (const auto& g : gt) gm.push_back(rasterize_mask(std::span<const Polygon>(&g.polygon, 1), height, width));

    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < pred.size(); ++i)
        for (std::size_t j = 0; j < gt.size(); ++j) {
            std::size_t inter = 0, uni = 0;
            for (std::size_t k = 0; k < pm[i].bits.size(); ++k) {
                inter += pm[i].bits[k] & gm[j].bits[k];
                uni += pm[i].bits[k] | gm[j].bits[k];
            }
            const double v = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
            if (v >= cfg.iou_threshold && v > 0.0) pairs.emplace_back(v, j, i);
        }
    std::sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
        if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
        return std::tie(std::get<1>(x), std::get<2>(x)) < std::tie(std::get<1>(y), std::get<2>(y));
    });

    F1Report report;
    std::vector<bool> pred_used(pred.size()), gt_used(gt.size());
    std::size_t e2e = 0;
    for (const auto& [v, j, i] : pairs) {
        if (pred_used[i] || gt_used[j]) continue;
        pred_used[i] = gt_used[j] = true;
        const bool same = transcripts_equal(pred[i].transcript, gt[j].transcript, cfg.strict_transcripts);
        e2e += same;
        report.matches.push_back({i, j, v, same});
    }
    report.det = make_scores(report.matches.size(), pred.size(), gt.size());
    report.e2e = make_scores(e2e, pred.size(), gt.size());
    return report;
}

}  // namespace glyphguide
