#pragma once

#include <filesystem>

#include "driftcurate/image.hpp"

namespace driftcurate::io {

// Binary PGM (P5) / PPM (P6), maxval 255 only.
Image load_image(const std::filesystem::path& path);

// 1-channel images go out as P5, 3-channel as P6. Samples are rounded to
// the nearest integer and clamped to [0,255].
void save_image(const Image& img, const std::filesystem::path& path);

// PGM interpreted as a binary mask: sample >= 128 maps to 1, else 0.
GrayPlane load_binary_mask(const std::filesystem::path& path);

// PGM interpreted as foreground probability: sample / 255 in [0,1].
GrayPlane load_probability_mask(const std::filesystem::path& path);

}  // namespace driftcurate::io
