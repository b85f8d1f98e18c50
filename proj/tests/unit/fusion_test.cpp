#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "glyphguide/errors.hpp"
#include "glyphguide/fusion.hpp"
#include "test_support.hpp"

namespace glyphguide {
namespace {

using ad::Tensor;

Image random_binary_guidance(Rng& rng, int h, int w) {
    std::vector<double> v(static_cast<std::size_t>(h) * w);
    for (double& x : v) x = rng.uniform() < 0.3 ? 1.0 : 0.0;
    std::vector<double> planar;
    for (int c = 0; c < 3; ++c) planar.insert(planar.end(), v.begin(), v.end());
    return Image(h, w, 3, std::move(planar));
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Random perturbation of every parameter so no branch is degenerate.
FusionParams perturbed(std::uint64_t seed, double amount) {
    FusionParams p = init_identity(seed);
    Rng rng(seed + 1000);
    for (ad::Parameter* q : p.all())
        for (double& v : q->value.mutable_values()) v += rng.uniform(-amount, amount);
    return p;
}

TEST(Fusion, IdentityInitReturnsDecoded) {
    Rng rng(91);
    const FusionParams p = init_identity(7);
    for (int trial = 0; trial < 3; ++trial) {
        const Image decoded = testing::random_image(rng, 24, 20);
        const Image guidance = random_binary_guidance(rng, 24, 20);
        const FusionOutput out = fuse(ad::from_image(decoded), ad::from_image(guidance), p);
        EXPECT_LT(max_abs_diff(out.image.values(), decoded.data()), 1e-9);
    }
}

TEST(Fusion, IdentityHoldsForAllOnesGuidance) {
    Rng rng(92);
    const Image decoded = testing::random_image(rng, 16, 16);
    const Image ones = testing::constant_image(16, 16, 3, 1.0);
    const Image out = fuse_image(decoded, ones, init_identity(3));
    EXPECT_LT(max_abs_diff(out.data(), decoded.data()), 1e-9);
}

TEST(Fusion, IdentityGateIsConstant) {
    Rng rng(93);
    const Image decoded = testing::random_image(rng, 8, 8);
    const FusionOutput out = fuse(ad::from_image(decoded), ad::from_image(random_binary_guidance(rng, 8, 8)),
                                  init_identity(1));
    EXPECT_EQ(out.attention.shape(), (ad::Shape{kFusedChannels, 8, 8}));
    const double expected = 1.0 / (1.0 + std::exp(-kMaskGateBias));
    for (double v : out.attention.values()) EXPECT_NEAR(v, expected, 1e-15);
}

TEST(Fusion, ParameterShapes) {
    const FusionParams p = init_identity(0);
    std::map<std::string, ad::Shape> shapes;
    for (const auto& t : p.to_named()) shapes[t.name] = t.shape;
    EXPECT_EQ(shapes.at("expand.weight"), (ad::Shape{kExpandedChannels, 3, 1, 1}));
    EXPECT_EQ(shapes.at("attention.trunk.0.reduce.weight"), (ad::Shape{kTrunkWidth, kFusedChannels, 1, 1}));
    EXPECT_EQ(shapes.at("attention.trunk.2.spatial.weight"), (ad::Shape{kTrunkWidth, kTrunkWidth, 3, 3}));
    EXPECT_EQ(shapes.at("attention.trunk.1.restore.weight"), (ad::Shape{kFusedChannels, kTrunkWidth, 1, 1}));
    EXPECT_EQ(shapes.at("attention.mask.conv2.weight"), (ad::Shape{kFusedChannels, kFusedChannels, 1, 1}));
    EXPECT_EQ(shapes.at("project.weight"), (ad::Shape{3, kFusedChannels, 1, 1}));
    std::size_t total = 0;
    for (const auto& t : p.to_named()) total += t.values.size();
    EXPECT_EQ(total, p.parameter_count());
}

TEST(Fusion, ModulatedGuidanceOccupiesLastThreeChannels) {
    // Project reads only channel 13 + c: output must equal guidance * decoded.
    FusionParams p = init_identity(5);
    auto w = p.project_w.value.mutable_values();
    std::fill(w.begin(), w.end(), 0.0);
    for (int c = 0; c < 3; ++c) w[static_cast<std::size_t>(c * kFusedChannels + kExpandedChannels + c)] = 1.0;
    // Silence the trunk and mask contributions to those channels.
    for (double& v : p.mask2_b.value.mutable_values()) v = -1e3;
    Rng rng(94);
    const Image decoded = testing::random_image(rng, 10, 12);
    const Image guidance = random_binary_guidance(rng, 10, 12);
    const FusionOutput out = fuse(ad::from_image(decoded), ad::from_image(guidance), p);
    for (std::size_t i = 0; i < decoded.data().size(); ++i)
        EXPECT_NEAR(out.image.values()[i], decoded.data()[i] * guidance.data()[i], 1e-12);
}

TEST(Fusion, SameSeedIsByteIdentical) {
    const auto a = ad::save_tensors(init_identity(42).to_named());
    const auto b = ad::save_tensors(init_identity(42).to_named());
    const auto c = ad::save_tensors(init_identity(43).to_named());
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(Fusion, GradientReachesEveryGroup) {
    Rng rng(95);
    const FusionParams p = perturbed(11, 0.05);
    const Tensor decoded = ad::from_image(testing::random_image(rng, 12, 12));
    const Tensor guidance = ad::from_image(random_binary_guidance(rng, 12, 12));
    const Tensor target = ad::from_image(testing::random_image(rng, 12, 12));
    ad::backward(ad::mse(fuse(decoded, guidance, p).image, target));
    std::map<FusionGroup, double> norm;
    for (const ad::Parameter* q : p.all()) {
        ASSERT_TRUE(q->value.has_grad()) << q->name;
        for (double g : q->value.grad()) norm[group_of(q->name)] += g * g;
    }
    for (FusionGroup g : {FusionGroup::expand, FusionGroup::trunk, FusionGroup::mask, FusionGroup::project})
        EXPECT_GT(norm[g], 0.0) << static_cast<int>(g);
}

TEST(Fusion, GradientsMatchFiniteDifferences) {
    Rng rng(96);
    const FusionParams p = perturbed(12, 0.1);
    const Tensor decoded = ad::from_image(testing::random_image(rng, 6, 7));
    const Tensor guidance = ad::from_image(random_binary_guidance(rng, 6, 7));
    const Tensor target = ad::from_image(testing::random_image(rng, 6, 7));
    std::vector<Tensor> leaves;
    for (const ad::Parameter* q : p.all()) leaves.push_back(q->value);
    const auto r = testing::check_gradients([&] { return ad::mse(fuse(decoded, guidance, p).image, target); },
                                            leaves, rng, 300);
    EXPECT_GT(r.checked, 250u);
    EXPECT_LT(r.max_relative_error, 1e-6);
}

TEST(Fusion, GuidanceHasNoEffectWhereDecodedIsZero) {
    // g' = g * decoded vanishes where decoded is 0 in every channel.
    Rng rng(97);
    const FusionParams p = perturbed(13, 0.2);
    const Image base = testing::random_image(rng, 9, 9);
    std::vector<double> d(base.data().begin(), base.data().end());
    const int y = 4, x = 4;
    for (int c = 0; c < 3; ++c) d[static_cast<std::size_t>((c * 9 + y) * 9 + x)] = 0.0;
    const Image decoded(9, 9, 3, d);
    const Image g1 = random_binary_guidance(rng, 9, 9);
    std::vector<double> g2v(g1.data().begin(), g1.data().end());
    for (int c = 0; c < 3; ++c) g2v[static_cast<std::size_t>((c * 9 + y) * 9 + x)] = 1.0 - g2v[static_cast<std::size_t>((c * 9 + y) * 9 + x)];
    const Image a = fuse_image(decoded, g1, p), b = fuse_image(decoded, Image(9, 9, 3, g2v), p);
    EXPECT_EQ(a, b);
}

TEST(Fusion, ShapeMismatchThrows) {
    const FusionParams p = init_identity(0);
    EXPECT_THROW(fuse(Tensor::zeros({3, 4, 4}), Tensor::zeros({3, 4, 5}), p), ShapeError);
    EXPECT_THROW(fuse(Tensor::zeros({1, 4, 4}), Tensor::zeros({1, 4, 4}), p), ShapeError);
}

TEST(Fusion, FuseImageDoesNotTouchParameters) {
    const FusionParams p = init_identity(21);
    const auto before = ad::save_tensors(p.to_named());
    Rng rng(98);
    fuse_image(testing::random_image(rng, 8, 8), random_binary_guidance(rng, 8, 8), p);
    EXPECT_EQ(ad::save_tensors(p.to_named()), before);
    for (const ad::Parameter* q : p.all()) EXPECT_FALSE(q->value.has_grad());
}

TEST(FusionParams, SnapshotRoundTrip) {
    const FusionParams p = perturbed(31, 0.3);
    const auto bytes = ad::save_tensors(p.to_named());
    const FusionParams q = FusionParams::from_named(ad::load_tensors(bytes));
    EXPECT_EQ(ad::save_tensors(q.to_named()), bytes);
    Rng rng(99);
    const Image d = testing::random_image(rng, 8, 8), g = random_binary_guidance(rng, 8, 8);
    EXPECT_EQ(fuse_image(d, g, p), fuse_image(d, g, q));
}

TEST(FusionParams, FromNamedRejectsBadLayouts) {
    auto named = init_identity(0).to_named();
    auto missing = named;
    missing.pop_back();
    EXPECT_THROW(FusionParams::from_named(missing), DecodeError);
    auto extra = named;
    extra.push_back({"extra", {1}, {0.0}});
    EXPECT_THROW(FusionParams::from_named(extra), DecodeError);
    auto reshaped = named;
    reshaped[0].shape = {1, 39, 1, 1};
    EXPECT_THROW(FusionParams::from_named(reshaped), DecodeError);
    auto nonfinite = named;
    nonfinite[0].values[0] = std::nan("");
    EXPECT_THROW(FusionParams::from_named(nonfinite), DecodeError);
}

TEST(FusionParams, CloneIsIndependent) {
    const FusionParams p = init_identity(4);
    FusionParams q = p.clone();
    q.project_b.value.mutable_values()[0] = 9.0;
    EXPECT_EQ(p.project_b.value.values()[0], 0.0);
}

TEST(FusionParams, GroupOf) {
    EXPECT_EQ(group_of("expand.bias"), FusionGroup::expand);
    EXPECT_EQ(group_of("attention.trunk.2.restore.weight"), FusionGroup::trunk);
    EXPECT_EQ(group_of("attention.mask.conv1.bias"), FusionGroup::mask);
    EXPECT_EQ(group_of("project.weight"), FusionGroup::project);
}

}  // namespace
}  // namespace glyphguide
