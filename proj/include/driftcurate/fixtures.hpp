#pragma once

#include <cstdint>
#include <filesystem>

#include "driftcurate/image.hpp"
#include "driftcurate/rng.hpp"
#include "driftcurate/tensor.hpp"

namespace driftcurate::fixtures {

// Multi-octave value noise (cells 32/16/8/4, halving amplitude), min-max
// stretched to [0,255]. Non-constant by construction.
io::GrayPlane value_noise_texture(uint64_t seed, int size);

// Foreground where the texture is at or above its median, as {0,255}.
io::GrayPlane median_mask(const io::GrayPlane& texture);

// Gaussian blob around per-channel cluster means; the negative cluster
// mirrors the positive one.
io::FeatureMap cluster_feature_map(Rng& rng, bool positive, uint32_t channels, int size);

struct CorpusOptions {
  int count = 20;
  uint64_t seed = 1;
  int texture_size = 64;
  uint32_t map_channels = 4;
  int map_size = 16;
};

// Writes images/texNNN.pgm, masks/texNNN.pgm, maps/texNNN.ften and a
// manifest.json with paths relative to out_dir. Even indices draw from the
// positive cluster generator, odd from the negative.
void generate_corpus(const std::filesystem::path& out_dir, const CorpusOptions& options);

}  // namespace driftcurate::fixtures
