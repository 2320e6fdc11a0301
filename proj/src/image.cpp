#include "driftcurate/image.hpp"

#include <cmath>
#include <string>

#include "driftcurate/error.hpp"

namespace driftcurate::io {

GrayPlane make_plane(int height, int width, double fill) {
  if (height <= 0 || width <= 0) {
    fail(ErrorCode::degenerate_dims, "plane dims must be positive, got " + std::to_string(height) +
                                         "x" + std::to_string(width));
  }
  GrayPlane plane;
  plane.height = height;
  plane.width = width;
  plane.values.assign(static_cast<size_t>(height) * static_cast<size_t>(width), fill);
  return plane;
}

void validate_plane(const GrayPlane& plane) {
  if (plane.width <= 0 || plane.height <= 0) {
    fail(ErrorCode::degenerate_dims, "plane dims must be positive");
  }
  if (plane.values.size() !=
      static_cast<size_t>(plane.width) * static_cast<size_t>(plane.height)) {
    fail(ErrorCode::dim_mismatch, "plane value count does not match dims");
  }
  for (double v : plane.values) {
    if (!std::isfinite(v)) fail(ErrorCode::range_error, "plane holds a non-finite value");
  }
}

void validate_image(const Image& img) {
  if (img.width <= 0 || img.height <= 0) {
    fail(ErrorCode::degenerate_dims, "image dims must be positive");
  }
  if (img.channels != 1 && img.channels != 3) {
    fail(ErrorCode::range_error, "image channels must be 1 or 3");
  }
  size_t expected = static_cast<size_t>(img.width) * static_cast<size_t>(img.height) *
                    static_cast<size_t>(img.channels);
  if (img.pixels.size() != expected) {
    fail(ErrorCode::dim_mismatch, "pixel count does not match width*height*channels");
  }
  for (double v : img.pixels) {
    if (!std::isfinite(v) || v < 0.0 || v > 255.0) {
      fail(ErrorCode::range_error, "pixel outside [0,255]");
    }
  }
}

GrayPlane channel_plane(const Image& img, int channel) {
  if (channel < 0 || channel >= img.channels) {
    fail(ErrorCode::invalid_argument, "channel index out of range");
  }
  GrayPlane plane = make_plane(img.height, img.width);
  const size_t stride = static_cast<size_t>(img.channels);
  for (size_t i = 0; i < plane.values.size(); ++i) {
    plane.values[i] = img.pixels[i * stride + static_cast<size_t>(channel)];
  }
  return plane;
}

Image planes_to_image(const std::vector<GrayPlane>& planes) {
  if (planes.empty() || (planes.size() != 1 && planes.size() != 3)) {
    fail(ErrorCode::invalid_argument, "expected 1 or 3 planes");
  }
  const GrayPlane& first = planes.front();
  for (const GrayPlane& p : planes) {
    if (p.width != first.width || p.height != first.height) {
      fail(ErrorCode::dim_mismatch, "plane dims differ");
    }
  }
  Image img;
  img.width = first.width;
  img.height = first.height;
  img.channels = static_cast<int>(planes.size());
  img.pixels.resize(first.values.size() * planes.size());
  for (size_t c = 0; c < planes.size(); ++c) {
    for (size_t i = 0; i < first.values.size(); ++i) {
      img.pixels[i * planes.size() + c] = planes[c].values[i];
    }
  }
  return img;
}

}  // namespace driftcurate::io
