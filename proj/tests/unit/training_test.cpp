#include <gtest/gtest.h>

#include <cmath>

#include "glyphguide/errors.hpp"
#include "glyphguide/guidance.hpp"
#include "glyphguide/training.hpp"
#include "test_support.hpp"

namespace glyphguide {
namespace {

using ad::Tensor;

Mask left_half(int h, int w) {
    Mask m(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w / 2; ++x) m.at(y, x) = 1;
    return m;
}

TEST(LossGc, FullAndEmptyMasks) {
    Rng rng(111);
    const Tensor x = testing::random_tensor(rng, {3, 4, 6}, false), y = testing::random_tensor(rng, {3, 4, 6}, false);
    EXPECT_DOUBLE_EQ(loss_gc(x, y, Mask(4, 6, 1)).item(), ad::mse(x, y).item());
    EXPECT_EQ(loss_gc(x, y, Mask(4, 6, 0)).item(), 0.0);
}

TEST(LossGc, HalfMaskConstantOffset) {
    const double c = 0.3;
    const Tensor x = Tensor::full({3, 4, 8}, 0.2), y = Tensor::full({3, 4, 8}, 0.2 + c);
    EXPECT_NEAR(loss_gc(x, y, left_half(4, 8)).item(), c * c / 2, 1e-15);
}

TEST(LossGc, InvariantOutsideMask) {
    Rng rng(112);
    const Tensor x = testing::random_tensor(rng, {3, 6, 6}, false), y = testing::random_tensor(rng, {3, 6, 6}, false);
    const Mask m = left_half(6, 6);
    std::vector<double> xv(x.values().begin(), x.values().end()), yv(y.values().begin(), y.values().end());
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 6; ++r)
            for (int col = 3; col < 6; ++col) {
                const double d = rng.uniform(-1, 1);
                xv[static_cast<std::size_t>((c * 6 + r) * 6 + col)] += d;
                yv[static_cast<std::size_t>((c * 6 + r) * 6 + col)] += d * 0.5 + 0.1;
            }
    EXPECT_EQ(loss_gc(Tensor({3, 6, 6}, xv), Tensor({3, 6, 6}, yv), m).item(), loss_gc(x, y, m).item());
}

TEST(LossStage1, Examples) {
    Rng rng(113);
    const Tensor x = testing::random_tensor(rng, {3, 4, 4}, false), y = testing::random_tensor(rng, {3, 4, 4}, false);
    EXPECT_EQ(loss_stage1(0.7, x, x, 5.0).item(), 0.7);
    EXPECT_EQ(loss_stage1(0.7, x, y, 0.0).item(), 0.7);
    const double a = loss_stage1(0.7, x, y, 1.0).item(), b = loss_stage1(0.7, x, y, 3.0).item();
    EXPECT_NEAR(b - 0.7, 3.0 * (a - 0.7), 1e-14);
    EXPECT_THROW(loss_stage1(-0.1, x, y, 1.0), ValidationError);
}

TEST(LossStage2, HandComputedTwoByTwo) {
    // One channel, 2x2, mask on the top row.
    const Tensor x({1, 2, 2}, {0.1, 0.2, 0.3, 0.4});
    const Tensor y({1, 2, 2}, {0.2, 0.0, 0.3, 0.9});
    Mask m(2, 2);
    m.at(0, 0) = m.at(0, 1) = 1;
    // mse = (0.01 + 0.04 + 0 + 0.25) / 4 = 0.075; gc = (0.01 + 0.04) / 4 = 0.0125
    // loss = 0.3 + 2 * (0.075 + 10 * 0.0125) = 0.7
    EXPECT_NEAR(loss_stage2(0.3, x, y, m, 2.0, 10.0).item(), 0.7, 1e-15);
}

TEST(LossStage2, AlphaZeroIsFrozenRateStage1) {
    Rng rng(114);
    const Tensor x = testing::random_tensor(rng, {3, 5, 5}, false), y = testing::random_tensor(rng, {3, 5, 5}, false);
    const Mask m = left_half(5, 5);
    EXPECT_DOUBLE_EQ(loss_stage2(0.4, x, y, m, 1.5, 0.0).item(), loss_stage1(0.4, x, y, 1.5).item());
}

TEST(LossStage2, RateReceivesNoGradient) {
    Rng rng(115);
    const Tensor bpp = Tensor::scalar(0.5, true);
    const Tensor x = testing::random_tensor(rng, {3, 4, 4}, false), y = testing::random_tensor(rng, {3, 4, 4});
    ad::backward(loss_stage2(bpp, x, y, left_half(4, 4), 1.0, 10.0));
    EXPECT_TRUE(!bpp.has_grad() || bpp.grad()[0] == 0.0);
    ASSERT_TRUE(y.has_grad());
}

TEST(LossStage2, GradientsMatchFiniteDifferences) {
    Rng rng(116);
    const Tensor x = testing::random_tensor(rng, {3, 5, 4}, false), y = testing::random_tensor(rng, {3, 5, 4});
    const Mask m = left_half(5, 4);
    const auto r = testing::check_gradients([&] { return loss_stage2(0.2, x, y, m, 1.0, 10.0); }, {y}, rng);
    EXPECT_EQ(r.kinks, 0u);
    EXPECT_LT(r.max_relative_error, 1e-6);
}

TEST(Synth, SameSeedSameDataset) {
    const auto a = synth_dataset(4, 9), b = synth_dataset(4, 9), c = synth_dataset(4, 10);
    EXPECT_EQ(hash_dataset(a), hash_dataset(b));
    EXPECT_NE(hash_dataset(a), hash_dataset(c));
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].image, b[i].image);
        EXPECT_EQ(a[i].annotations, b[i].annotations);
    }
}

TEST(Synth, SceneIndexIsIndependentOfCount) {
    const auto a = synth_dataset(2, 5), b = synth_dataset(5, 5);
    EXPECT_EQ(hash_scene(a[1]), hash_scene(b[1]));
}

TEST(Synth, WordsFollowTheGenerator) {
    const auto scenes = synth_dataset(20, 3);
    for (const SynthScene& s : scenes) {
        EXPECT_EQ(s.image.height(), 256);
        EXPECT_EQ(s.annotations.image_width, 256u);
        EXPECT_GE(s.annotations.records.size(), 1u);
        EXPECT_LE(s.annotations.records.size(), 8u);
        for (const AuxRecord& r : s.annotations.records) {
            EXPECT_GE(r.text.size(), 2u);
            EXPECT_LE(r.text.size(), 8u);
        }
    }
}

TEST(Synth, AnnotationsOverlapRenderedGlyphs) {
    for (const SynthScene& s : synth_dataset(10, 4)) {
        for (const AuxRecord& r : s.annotations.records) {
            const Mask box = rasterize_mask(std::span(&r.polygon, 1), s.image.height(), s.image.width());
            AuxPayload single{s.annotations.image_width, s.annotations.image_height, {r}};
            const Mask glyphs = render_guidance(single, s.image.height(), s.image.width()).glyphs();
            std::size_t overlap = 0;
            for (std::size_t i = 0; i < box.bits.size(); ++i) overlap += box.bits[i] && glyphs.bits[i];
            EXPECT_GT(overlap, 0u) << r.text;
        }
    }
}

TEST(Synth, GlyphPixelsAreInked) {
    // Every glyph pixel carries the word's ink color, so it differs from the
    // background at pixels with contrast.
    for (const SynthScene& s : synth_dataset(5, 6)) {
        const Mask all = render_guidance(s.annotations, s.image.height(), s.image.width()).glyphs();
        std::size_t dark_or_light = 0;
        for (int y = 0; y < all.height; ++y)
            for (int x = 0; x < all.width; ++x) {
                if (!all.at(y, x)) continue;
                const double v = s.image.at(0, y, x);
                dark_or_light += (v <= 0.15 + 1e-12 || v >= 0.85 - 1e-12);
            }
        EXPECT_EQ(dark_or_light, all.count());
    }
}

TEST(Synth, CharacterAreasStraddleTrainThreshold) {
    std::size_t below = 0, above = 0;
    for (const SynthScene& s : synth_dataset(20, 8))
        for (const AuxRecord& r : s.annotations.records)
            (avg_char_area(r.polygon, r.text) > kTrainThreshold ? above : below)++;
    EXPECT_GT(below, 0u);
    EXPECT_GT(above, 0u);
}

TEST(CropScene, KeepsOnlyContainedWordsShifted) {
    SynthScene s;
    s.image = testing::constant_image(64, 64, 3, 0.5);
    s.annotations = {64, 64, {}};
    s.annotations.records.push_back({Polygon({{10, 10}, {30, 10}, {30, 20}, {10, 20}}), "in"});
    s.annotations.records.push_back({Polygon({{40, 40}, {60, 40}, {60, 50}, {40, 50}}), "out"});
    const SynthScene c = crop_scene(s, 5, 5, 32);
    ASSERT_EQ(c.annotations.records.size(), 1u);
    EXPECT_EQ(c.annotations.records[0].polygon, Polygon({{5, 5}, {25, 5}, {25, 15}, {5, 15}}));
    EXPECT_EQ(c.image.width(), 32);
    EXPECT_EQ(c.annotations.image_width, 32u);
}

TEST(PrepareCrop, MaskFollowsFilteredBoxes) {
    SynthScene s;
    s.image = testing::constant_image(64, 64, 3, 0.5);
    s.annotations = {64, 64, {}};
    // 40x20 box, 2 chars: 400 px^2/char (dropped at 150). 8x8 box, 2 chars: 32 (kept).
    s.annotations.records.push_back({Polygon({{4, 4}, {44, 4}, {44, 24}, {4, 24}}), "ab"});
    s.annotations.records.push_back({Polygon({{50, 50}, {58, 50}, {58, 58}, {50, 58}}), "cd"});
    const PreparedCrop kept = prepare_crop(s, 4, 12, kTrainThreshold);
    const PreparedCrop all = prepare_crop(s, 4, 12, kTrainThreshold, true);
    EXPECT_EQ(kept.loss_mask.at(10, 10), 0);
    EXPECT_EQ(all.loss_mask.at(10, 10), 1);
    EXPECT_EQ(kept.loss_mask.at(54, 54), 1);
    EXPECT_GT(kept.bpp_aux, 0.0);
    EXPECT_EQ(kept.guidance, all.guidance);
}

TEST(PrepareCrop, EmptyAnnotationsCostNothing) {
    SynthScene s;
    s.image = testing::constant_image(32, 32, 3, 0.4);
    s.annotations = {32, 32, {}};
    const PreparedCrop p = prepare_crop(s, 4, 12, kTrainThreshold);
    EXPECT_EQ(p.bpp_aux, 0.0);
    EXPECT_EQ(p.loss_mask.count(), 0u);
}

TEST(TrainConfig, Validation) {
    TrainConfig c;
    EXPECT_NO_THROW(c.validate());
    c.alpha = -1;
    EXPECT_THROW(c.validate(), ValidationError);
    c = {};
    c.lr = 0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = {};
    c.stride = 5;
    EXPECT_THROW(c.validate(), ValidationError);
}

class SmallTraining : public ::testing::Test {
protected:
    static SynthConfig scene_config() {
        SynthConfig s;
        s.width = s.height = 48;
        s.min_words = 1;
        s.max_words = 3;
        return s;
    }
    static TrainConfig train_config() {
        TrainConfig c;
        c.crop = 32;
        c.epochs = 4;
        c.batch = 2;
        c.lr = 1e-2;
        c.seed = 17;
        return c;
    }
};

TEST_F(SmallTraining, LossIsFiniteAndDecreases) {
    const auto data = synth_dataset(6, 21, scene_config());
    const TrainResult r = train_stage2(data, init_identity(1), train_config());
    ASSERT_EQ(r.epoch_loss.size(), 4u);
    EXPECT_EQ(r.step_loss.size(), 24u);
    for (double v : r.step_loss) EXPECT_TRUE(std::isfinite(v));
    EXPECT_LT(r.epoch_loss.back(), r.epoch_loss.front());
}

TEST_F(SmallTraining, OnlyFusionStateChanges) {
    const auto data = synth_dataset(4, 22, scene_config());
    const std::uint64_t data_hash = hash_dataset(data);
    const FusionParams init = init_identity(2);
    const auto init_bytes = ad::save_tensors(init.to_named());
    const TrainConfig cfg = train_config();
    const TrainResult r = train_stage2(data, init, cfg);
    EXPECT_EQ(hash_dataset(data), data_hash);
    EXPECT_EQ(ad::save_tensors(init.to_named()), init_bytes);
    EXPECT_NE(ad::save_tensors(r.params.to_named()), init_bytes);
    EXPECT_EQ(cfg.stride, 4);
    EXPECT_EQ(cfg.gain, 12.0);
}

TEST_F(SmallTraining, DeterministicToTheBit) {
    const auto data = synth_dataset(4, 23, scene_config());
    TrainConfig cfg = train_config();
    cfg.epochs = 2;
    const TrainResult a = train_stage2(data, init_identity(3), cfg);
    const TrainResult b = train_stage2(data, init_identity(3), cfg);
    EXPECT_EQ(a.step_loss, b.step_loss);
    EXPECT_EQ(ad::save_tensors(a.params.to_named()), ad::save_tensors(b.params.to_named()));
}

TEST_F(SmallTraining, EpochCallbackSeesMeans) {
    const auto data = synth_dataset(3, 24, scene_config());
    TrainConfig cfg = train_config();
    cfg.epochs = 2;
    std::vector<double> seen;
    const TrainResult r = train_stage2(data, init_identity(4), cfg, [&](int, double loss) { seen.push_back(loss); });
    EXPECT_EQ(seen, r.epoch_loss);
}

TEST_F(SmallTraining, RejectsUndersizedScenes) {
    const auto data = synth_dataset(2, 25, scene_config());
    TrainConfig cfg = train_config();
    cfg.crop = 64;
    EXPECT_THROW(train_stage2(data, init_identity(0), cfg), ValidationError);
    EXPECT_THROW(train_stage2({}, init_identity(0), train_config()), ValidationError);
}

TEST(AttentionStats, InsideOutsideMeans) {
    std::vector<double> v(2 * 2 * 2);
    // Channel 0: {1, 2; 3, 4}, channel 1: {5, 6; 7, 8}; mask on the first column.
    for (int i = 0; i < 8; ++i) v[static_cast<std::size_t>(i)] = i + 1;
    Mask m(2, 2);
    m.at(0, 0) = m.at(1, 0) = 1;
    const AttentionStats s = attention_stats(Tensor({2, 2, 2}, v), m);
    EXPECT_DOUBLE_EQ(s.inside, (1 + 3 + 5 + 7) / 4.0);
    EXPECT_DOUBLE_EQ(s.outside, (2 + 4 + 6 + 8) / 4.0);
    EXPECT_EQ(s.inside_pixels, 2u);
    EXPECT_THROW(attention_stats(Tensor::zeros({2, 3, 2}), m), ShapeError);
}

}  // namespace
}  // namespace glyphguide
