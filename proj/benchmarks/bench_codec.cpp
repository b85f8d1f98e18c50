#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>

#include "glyphguide/entropy.hpp"
#include "glyphguide/metrics.hpp"
#include "glyphguide/random.hpp"
#include "glyphguide/synth.hpp"
#include "glyphguide/toy_codec.hpp"

namespace {

using namespace glyphguide;

struct Symbols {
    std::vector<int> values;
    std::vector<SymbolModel> models;
};

Symbols make_symbols(std::size_t n) {
    Rng rng(3);
    Symbols s;
    for (std::size_t i = 0; i < n; ++i) {
        const double sigma = rng.uniform(0.5, 4.0);
        s.models.emplace_back(0.0, sigma);
        s.values.push_back(static_cast<int>(std::clamp(std::round(rng.normal(0.0, sigma)), -64.0, 64.0)));
    }
    return s;
}

void BM_RangeEncode(benchmark::State& state) {
    const Symbols s = make_symbols(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(rc_encode(s.values, s.models));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RangeEncode)->Arg(1 << 12)->Arg(1 << 16);

void BM_RangeDecode(benchmark::State& state) {
    const Symbols s = make_symbols(static_cast<std::size_t>(state.range(0)));
    const auto bytes = rc_encode(s.values, s.models);
    for (auto _ : state) benchmark::DoNotOptimize(rc_decode(bytes, s.models));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RangeDecode)->Arg(1 << 12)->Arg(1 << 16);

void BM_Compress(benchmark::State& state) {
    SynthConfig cfg;
    cfg.width = cfg.height = static_cast<int>(state.range(0));
    const SynthScene scene = synth_scene(1, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(compress(scene.image, 4, 12));
}
BENCHMARK(BM_Compress)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Decompress(benchmark::State& state) {
    SynthConfig cfg;
    cfg.width = cfg.height = static_cast<int>(state.range(0));
    const CodedImage coded = compress(synth_scene(1, cfg).image, 4, 12);
    for (auto _ : state) benchmark::DoNotOptimize(decompress(coded));
}
BENCHMARK(BM_Decompress)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_MsSsim(benchmark::State& state) {
    const SynthScene scene = synth_scene(2);
    const Image decoded = decompress(compress(scene.image, 4, 12));
    for (auto _ : state) benchmark::DoNotOptimize(ms_ssim(scene.image, decoded));
}
BENCHMARK(BM_MsSsim)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
