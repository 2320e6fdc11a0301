#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace driftcurate::io {

// Channel-major, row-major within a channel.
struct FeatureMap {
  uint32_t channels = 0;  // V
  uint32_t height = 0;    // p
  uint32_t width = 0;     // q
  std::vector<float> data;

  float at(uint32_t ch, uint32_t row, uint32_t col) const {
    return data[(static_cast<size_t>(ch) * height + row) * width + col];
  }
  float& at(uint32_t ch, uint32_t row, uint32_t col) {
    return data[(static_cast<size_t>(ch) * height + row) * width + col];
  }
};

void validate_feature_map(const FeatureMap& map);

inline constexpr uint64_t kDefaultTensorElementCap = uint64_t{1} << 28;

// FTEN container, little-endian:
//   bytes 0-3  magic "FTEN"
//   byte  4    version = 1
//   byte  5    dtype   = 1 (32-bit float)
//   byte  6    ndim    = 3
//   byte  7    reserved = 0
//   3 x u32    dims (V, p, q)
//   V*p*q f32  payload
FeatureMap read_tensor(const std::filesystem::path& path,
                       uint64_t element_cap = kDefaultTensorElementCap);
void write_tensor(const FeatureMap& map, const std::filesystem::path& path);

}  // namespace driftcurate::io
