#pragma once

#include <cstddef>
#include <vector>

namespace driftcurate::io {

// Single-channel raster, row-major. Luminance planes hold [0,255];
// derived planes (MSCN, pairwise products) are unbounded.
struct GrayPlane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double& at(int row, int col) {
    return values[static_cast<size_t>(row) * static_cast<size_t>(width) + static_cast<size_t>(col)];
  }
  double at(int row, int col) const {
    return values[static_cast<size_t>(row) * static_cast<size_t>(width) + static_cast<size_t>(col)];
  }
  size_t size() const { return values.size(); }
};

GrayPlane make_plane(int height, int width, double fill = 0.0);
void validate_plane(const GrayPlane& plane);

// Pixel raster in [0,255], row-major, channel-interleaved. 1 or 3 channels.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> pixels;
};

void validate_image(const Image& img);
GrayPlane channel_plane(const Image& img, int channel);
Image planes_to_image(const std::vector<GrayPlane>& planes);

}  // namespace driftcurate::io
