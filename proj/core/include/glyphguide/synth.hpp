#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "glyphguide/aux_stream.hpp"
#include "glyphguide/image.hpp"

namespace glyphguide {

struct SynthConfig {
    int width = 256;
    int height = 256;
    int min_words = 3;
    int max_words = 8;
    /// Glyph cell size in pixels; a word of n characters covers an
    /// (n * cell) x cell box, so its average character area is cell^2.
    int min_cell = 6;
    int max_cell = 14;
};

/// Synthetic text scene: background plus rendered words, with the words'
/// boxes and transcripts as ground truth.
struct SynthScene {
    Image image;
    AuxPayload annotations;
};

/// Words the generator draws from.
std::span<const char* const> synth_lexicon();

/// Smooth gradient background with low-frequency ripples and 3-8 words at
/// angles {0, 15, -15, 90} degrees. Words never overlap. Glyphs are drawn
/// with the same renderer the decoder uses for guidance, so each
/// annotation's guidance raster marks exactly the recolored pixels.
/// Deterministic: scene i depends only on (seed, i).
SynthScene synth_scene(std::uint64_t seed, const SynthConfig& cfg = {});
std::vector<SynthScene> synth_dataset(int n, std::uint64_t seed, const SynthConfig& cfg = {});

/// FNV-1a over image samples and encoded annotations.
std::uint64_t hash_scene(const SynthScene& scene, std::uint64_t h = 14695981039346656037ull);
std::uint64_t hash_dataset(const std::vector<SynthScene>& scenes);

}  // namespace glyphguide
