#pragma once

#include <limits>
#include <string>
#include <vector>

#include "glyphguide/geometry.hpp"
#include "glyphguide/image.hpp"

namespace glyphguide {

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// 10 log10(1 / mse) on the [0, 1] scale; +inf for identical images.
double psnr(const Image& a, const Image& b);
/// PSNR restricted to pixels where `m` is set (all channels). +inf when the
/// mask is empty or the masked pixels agree.
double masked_psnr(const Image& a, const Image& b, const Mask& m);

/// Multi-scale SSIM averaged over channels. Uses an 11x11 Gaussian window
/// (sigma 1.5) with valid filtering, 2x2 mean pooling between scales and the
/// standard five scale weights. Smaller images use as many scales as fit
/// (each needs a side of at least 11 px) with the weights renormalized.
/// Throws ShapeError below 11 px or on mismatched shapes.
double ms_ssim(const Image& a, const Image& b);
/// Number of scales ms_ssim evaluates for an image of this size.
int ms_ssim_scales(int height, int width);

/// Rasterized IoU at pixel-center resolution; 0 when both masks are empty.
double iou(const Polygon& a, const Polygon& b, int height, int width);

struct SpottedWord {
    Polygon polygon;
    std::string transcript;
};
using SpottingResult = std::vector<SpottedWord>;

struct Match {
    std::size_t pred = 0;
    std::size_t gt = 0;
    double iou = 0.0;
    bool transcript_match = false;
};

struct Scores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t true_positives = 0;
};

struct F1Report {
    Scores det;
    Scores e2e;
    std::vector<Match> matches;
};

struct MatchConfig {
    double iou_threshold = 0.5;
    /// Exact, case-sensitive transcript comparison instead of the default
    /// trimmed ASCII case-insensitive one.
    bool strict_transcripts = false;
};

/// Greedy one-to-one matching by descending IoU (ties by gt index, then pred
/// index). Pairs at or above the threshold count for DET; E2E also needs
/// the transcripts to agree.
F1Report f1_report(const SpottingResult& pred, const SpottingResult& gt, int height, int width,
                   const MatchConfig& cfg = {});

/// f1 = 2PR / (P + R) with 0/0 = 0.
Scores make_scores(std::size_t tp, std::size_t n_pred, std::size_t n_gt);
bool transcripts_equal(const std::string& a, const std::string& b, bool strict);

}  // namespace glyphguide
