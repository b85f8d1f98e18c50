#include "glyphguide/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "glyphguide/errors.hpp"
#include "glyphguide/guidance.hpp"
#include "glyphguide/random.hpp"
#include "glyphguide/toy_codec.hpp"

namespace glyphguide {

void TrainConfig::validate() const {
    if (!(alpha >= 0.0)) throw ValidationError("train: alpha must be >= 0");
    if (!(lambda >= 0.0)) throw ValidationError("train: lambda must be >= 0");
    if (!(lr > 0.0)) throw ValidationError("train: lr must be > 0");
    if (epochs < 0) throw ValidationError("train: epochs must be >= 0");
    if (batch < 1) throw ValidationError("train: batch must be >= 1");
    if (crop < 16) throw ValidationError("train: crop must be >= 16");
    if (!(t_train > 0.0)) throw ValidationError("train: t_train must be > 0");
    validate_codec_params(stride, gain);
}

ad::Tensor loss_gc(const ad::Tensor& x, const ad::Tensor& x_hat, const Mask& m) { return ad::masked_mse(x, x_hat, m); }

ad::Tensor loss_stage1(double bpp, const ad::Tensor& x, const ad::Tensor& x_hat, double lambda) {
    if (bpp < 0.0) throw ValidationError("loss_stage1: bpp must be >= 0");
    return ad::add_constant(ad::scale(ad::mse(x, x_hat), lambda), bpp);
}

ad::Tensor loss_stage2(double bpp_const, const ad::Tensor& x, const ad::Tensor& x_hat, const Mask& m, double lambda,
                       double alpha) {
    ad::Tensor distortion = ad::add(ad::mse(x, x_hat), ad::scale(loss_gc(x, x_hat, m), alpha));
    return ad::add_constant(ad::scale(distortion, lambda), bpp_const);
}

ad::Tensor loss_stage2(const ad::Tensor& bpp_const, const ad::Tensor& x, const ad::Tensor& x_hat, const Mask& m,
                       double lambda, double alpha) {
    return loss_stage2(bpp_const.item(), x, x_hat, m, lambda, alpha);
}

SynthScene crop_scene(const SynthScene& scene, int x0, int y0, int size) {
    SynthScene out;
    out.image = crop(scene.image, x0, y0, size, size);
    out.annotations.image_width = static_cast<std::uint32_t>(size);
    out.annotations.image_height = static_cast<std::uint32_t>(size);
    for (const AuxRecord& r : scene.annotations.records) {
        std::vector<Point> moved;
        bool inside = true;
        for (Point p : r.polygon.vertices()) {
            p = {p.x - x0, p.y - y0};
            inside = inside && p.x >= 0 && p.y >= 0 && p.x <= size && p.y <= size;
            moved.push_back(p);
        }
        if (inside) out.annotations.records.push_back({Polygon(std::move(moved)), r.text});
    }
    return out;
}

PreparedCrop prepare_crop(const SynthScene& scene, int stride, double gain, double threshold, bool use_all_boxes) {
    PreparedCrop out;
    out.original = scene.image;
    const CodedImage coded = compress(scene.image, stride, gain);
    out.decoded = decompress(coded);
    out.bpp_image = coded.bpp();

    const AuxPayload kept = filter_records(scene.annotations, FilterConfig{threshold});
    const std::vector<std::uint8_t> aux = transmit_aux(kept);
    out.bpp_aux = aux_bpp(aux, scene.image.height(), scene.image.width());
    out.guidance = render_guidance(kept, scene.image.height(), scene.image.width()).to_image();

    const AuxPayload& boxes = use_all_boxes ? scene.annotations : kept;
    std::vector<Polygon> polys;
    for (const AuxRecord& r : boxes.records) polys.push_back(r.polygon);
    out.loss_mask = rasterize_mask(polys, scene.image.height(), scene.image.width());
    return out;
}

TrainResult train_stage2(const std::vector<SynthScene>& dataset, const FusionParams& init, const TrainConfig& cfg,
                         const EpochCallback& on_epoch) {
    cfg.validate();
    if (dataset.empty()) throw ValidationError("train: dataset is empty");
    for (const SynthScene& s : dataset)
        if (s.image.height() < cfg.crop || s.image.width() < cfg.crop)
            throw ValidationError("train: scene smaller than crop size " + std::to_string(cfg.crop));

    TrainResult result{init.clone(), {}, {}};
    std::vector<ad::Parameter*> params = result.params.all();
    const ad::AdamConfig adam{cfg.lr, 0.9, 0.999, 1e-8};
    Rng rng(cfg.seed);

    std::vector<std::size_t> order(dataset.size());
    std::size_t step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.integer(0, static_cast<int>(i) - 1))]);

        double epoch_total = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch));
            for (ad::Parameter* p : params) p->value.zero_grad();
            for (std::size_t k = start; k < end; ++k) {
                const SynthScene& scene = dataset[order[k]];
                const int x0 = rng.integer(0, scene.image.width() - cfg.crop);
                const int y0 = rng.integer(0, scene.image.height() - cfg.crop);
                const PreparedCrop crop = prepare_crop(crop_scene(scene, x0, y0, cfg.crop), cfg.stride, cfg.gain,
                                                       cfg.t_train, cfg.use_all_boxes);
                const ad::Tensor x = ad::from_image(crop.original);
                const FusionOutput fused =
                    fuse(ad::from_image(crop.decoded), ad::from_image(crop.guidance), result.params);
                const ad::Tensor loss = loss_stage2(crop.bpp_image + crop.bpp_aux, x, fused.image, crop.loss_mask,
                                                    cfg.lambda, cfg.alpha);
                const double value = loss.item();
                if (!std::isfinite(value))
                    throw NumericError("train: non-finite loss at step " + std::to_string(step) + " (epoch " +
                                       std::to_string(epoch) + ")");
                ad::backward(loss);
                result.step_loss.push_back(value);
                epoch_total += value;
                ++step;
            }
            ad::adam_step(params, adam, 1.0 / static_cast<double>(end - start));
            for (const ad::Parameter* p : params)
                for (double v : p->value.values())
                    if (!std::isfinite(v))
                        throw NumericError("train: parameter '" + p->name + "' became non-finite at step " +
                                           std::to_string(step));
        }
        const double mean_loss = epoch_total / static_cast<double>(order.size());
        result.epoch_loss.push_back(mean_loss);
        if (on_epoch) on_epoch(epoch, mean_loss);
    }
    for (ad::Parameter* p : params) p->value.zero_grad();
    return result;
}

AttentionStats attention_stats(const ad::Tensor& attention, const Mask& text) {
    if (attention.shape().size() != 3 || attention.dim(1) != text.height || attention.dim(2) != text.width)
        throw ShapeError("attention_stats: attention " + ad::to_string(attention.shape()) + " does not match mask " +
                         std::to_string(text.height) + "x" + std::to_string(text.width));
    const std::size_t plane = text.bits.size();
    double in = 0.0, out = 0.0;
    std::size_t n_in = 0;
    const auto v = attention.values();
    for (int c = 0; c < attention.dim(0); ++c)
        for (std::size_t i = 0; i < plane; ++i) {
            const double a = v[static_cast<std::size_t>(c) * plane + i];
            if (text.bits[i]) in += a;
            else out += a;
        }
    for (std::uint8_t b : text.bits) n_in += b;
    const double channels = attention.dim(0);
    AttentionStats s;
    s.inside_pixels = n_in;
    s.inside = n_in == 0 ? 0.0 : in / (channels * static_cast<double>(n_in));
    s.outside = n_in == plane ? 0.0 : out / (channels * static_cast<double>(plane - n_in));
    return s;
}

}  // namespace glyphguide
