#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "glyphguide/fusion.hpp"
#include "glyphguide/synth.hpp"
#include "glyphguide/tensor.hpp"

namespace glyphguide {

struct TrainConfig {
    double alpha = 10.0;
    double lambda = 1.0;
    double lr = 1e-3;
    int epochs = 10;
    int batch = 4;
    int crop = 256;
    double t_train = kTrainThreshold;
    std::uint64_t seed = 0;
    /// Build the loss mask from every annotation instead of only the
    /// transmitted (filtered) ones.
    bool use_all_boxes = false;
    int stride = 4;
    double gain = 12.0;

    /// Throws ValidationError on out-of-range fields.
    void validate() const;
};

/// masked_mse(x, x_hat, m) with the full element count as denominator.
ad::Tensor loss_gc(const ad::Tensor& x, const ad::Tensor& x_hat, const Mask& m);
/// bpp + lambda * mse(x, x_hat).
ad::Tensor loss_stage1(double bpp, const ad::Tensor& x, const ad::Tensor& x_hat, double lambda);
/// bpp_const + lambda * (mse(x, x_hat) + alpha * loss_gc(x, x_hat, m)).
/// The rate enters as a constant, so it never receives a gradient.
ad::Tensor loss_stage2(double bpp_const, const ad::Tensor& x, const ad::Tensor& x_hat, const Mask& m,
                       double lambda, double alpha);
ad::Tensor loss_stage2(const ad::Tensor& bpp_const, const ad::Tensor& x, const ad::Tensor& x_hat, const Mask& m,
                       double lambda, double alpha);

/// Everything one training or evaluation step needs for a scene crop.
struct PreparedCrop {
    Image original;
    Image decoded;
    Image guidance;
    Mask loss_mask;
    double bpp_image = 0.0;
    double bpp_aux = 0.0;
};

/// Window of a scene; annotations that do not lie fully inside are dropped
/// and the rest are shifted into crop coordinates.
SynthScene crop_scene(const SynthScene& scene, int x0, int y0, int size);

/// Compress/decompress with the toy codec, filter at `threshold`, render
/// guidance and rasterize the loss mask.
PreparedCrop prepare_crop(const SynthScene& scene, int stride, double gain, double threshold,
                          bool use_all_boxes = false);

struct TrainResult {
    FusionParams params;
    /// Mean loss per epoch.
    std::vector<double> epoch_loss;
    /// Loss of every crop in processing order.
    std::vector<double> step_loss;
};

/// Called after each epoch with (epoch index, mean loss).
using EpochCallback = std::function<void(int, double)>;

/// Stage-2 fine-tuning. Only the fusion parameters are updated; the codec
/// has no state and the dataset is read-only. Each step accumulates
/// gradients over `batch` crops and applies one Adam update with mean
/// reduction. Throws NumericError naming the step if a loss is non-finite.
TrainResult train_stage2(const std::vector<SynthScene>& dataset, const FusionParams& init, const TrainConfig& cfg,
                         const EpochCallback& on_epoch = {});

/// Mean attention activation (over all mask-branch channels) inside and
/// outside a text mask.
struct AttentionStats {
    double inside = 0.0;
    double outside = 0.0;
    std::size_t inside_pixels = 0;
};
AttentionStats attention_stats(const ad::Tensor& attention, const Mask& text);

}  // namespace glyphguide
