#include <benchmark/benchmark.h>

#include "glyphguide/fusion.hpp"
#include "glyphguide/guidance.hpp"
#include "glyphguide/random.hpp"
#include "glyphguide/synth.hpp"
#include "glyphguide/toy_codec.hpp"
#include "glyphguide/training.hpp"

namespace {

using namespace glyphguide;
using ad::Tensor;

Tensor filled(ad::Shape shape, std::uint64_t seed, bool grad) {
    Rng rng(seed);
    std::vector<double> v(ad::numel(shape));
    for (double& x : v) x = rng.uniform(-1, 1);
    return Tensor(std::move(shape), std::move(v), grad);
}

void BM_Conv2dForward(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const Tensor x = filled({16, 256, 256}, 1, false), w = filled({16, 16, k, k}, 2, false), b = filled({16}, 3, false);
    for (auto _ : state) benchmark::DoNotOptimize(ad::conv2d(x, w, b));
}
BENCHMARK(BM_Conv2dForward)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Conv2dBackward(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const Tensor x = filled({16, 256, 256}, 1, true), w = filled({16, 16, k, k}, 2, true), b = filled({16}, 3, true);
    for (auto _ : state) {
        ad::backward(ad::sum(ad::conv2d(x, w, b)));
        benchmark::DoNotOptimize(w.grad().data());
    }
}
BENCHMARK(BM_Conv2dBackward)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

struct Crop {
    PreparedCrop crop;
    FusionParams params = init_identity(0);
};

Crop make_crop() {
    Crop c;
    c.crop = prepare_crop(synth_scene(4), 4, 12, kTrainThreshold);
    return c;
}

void BM_FuseInference(benchmark::State& state) {
    const Crop c = make_crop();
    for (auto _ : state) benchmark::DoNotOptimize(fuse_image(c.crop.decoded, c.crop.guidance, c.params));
}
BENCHMARK(BM_FuseInference)->Unit(benchmark::kMillisecond);

void BM_TrainingStep(benchmark::State& state) {
    const Crop c = make_crop();
    const Tensor x = ad::from_image(c.crop.original);
    const Tensor decoded = ad::from_image(c.crop.decoded), guidance = ad::from_image(c.crop.guidance);
    for (auto _ : state) {
        const FusionOutput out = fuse(decoded, guidance, c.params);
        ad::backward(loss_stage2(c.crop.bpp_image + c.crop.bpp_aux, x, out.image, c.crop.loss_mask, 1.0, 10.0));
    }
}
BENCHMARK(BM_TrainingStep)->Unit(benchmark::kMillisecond);

}  // namespace
