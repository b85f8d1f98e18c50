#include <benchmark/benchmark.h>

#include "glyphguide/aux_stream.hpp"
#include "glyphguide/guidance.hpp"
#include "glyphguide/random.hpp"
#include "glyphguide/synth.hpp"

namespace {

using namespace glyphguide;

AuxPayload scene_words(int size) {
    SynthConfig cfg;
    cfg.width = cfg.height = size;
    cfg.min_words = cfg.max_words = 8;
    return synth_scene(5, cfg).annotations;
}

void BM_EncodeAux(benchmark::State& state) {
    const AuxPayload p = scene_words(256);
    for (auto _ : state) benchmark::DoNotOptimize(encode_aux(p));
}
BENCHMARK(BM_EncodeAux);

void BM_DecodeAux(benchmark::State& state) {
    const auto bytes = encode_aux(scene_words(256));
    for (auto _ : state) benchmark::DoNotOptimize(decode_aux(bytes));
}
BENCHMARK(BM_DecodeAux);

void BM_RenderGuidance(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    const AuxPayload p = scene_words(size);
    for (auto _ : state) benchmark::DoNotOptimize(render_guidance(p, size, size));
}
BENCHMARK(BM_RenderGuidance)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_MinAreaRect(benchmark::State& state) {
    Rng rng(6);
    std::vector<Point> pts;
    for (int i = 0; i < state.range(0); ++i) pts.push_back({rng.uniform(0, 1000), rng.uniform(0, 1000)});
    for (auto _ : state) benchmark::DoNotOptimize(min_area_rect(pts));
}
BENCHMARK(BM_MinAreaRect)->Arg(12)->Arg(1000);

}  // namespace
