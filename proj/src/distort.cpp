#include "driftcurate/distort.hpp"

#include <bit>

#include "driftcurate/error.hpp"

namespace driftcurate::distort {

io::GrayPlane pyr_down(const io::GrayPlane& plane) {
  io::validate_plane(plane);
  if (plane.width < 2 || plane.height < 2) {
    fail(ErrorCode::degenerate_dims, "pyr_down needs dims >= 2x2");
  }
  io::GrayPlane out = io::make_plane(plane.height / 2, plane.width / 2);
  for (int i = 0; i < out.height; ++i) {
    for (int j = 0; j < out.width; ++j) {
      // pairwise grouping keeps block means of constant blocks exact
      const double top = plane.at(2 * i, 2 * j) + plane.at(2 * i, 2 * j + 1);
      const double bottom = plane.at(2 * i + 1, 2 * j) + plane.at(2 * i + 1, 2 * j + 1);
      out.at(i, j) = (top + bottom) / 4.0;
    }
  }
  return out;
}

io::GrayPlane pyr_up(const io::GrayPlane& plane, int target_h, int target_w) {
  io::validate_plane(plane);
  if (target_h < 1 || target_w < 1) {
    fail(ErrorCode::degenerate_dims, "pyr_up target dims must be positive");
  }
  io::GrayPlane out = io::make_plane(target_h, target_w);
  for (int i = 0; i < target_h; ++i) {
    const int src_i = std::min(i / 2, plane.height - 1);
    for (int j = 0; j < target_w; ++j) {
      out.at(i, j) = plane.at(src_i, std::min(j / 2, plane.width - 1));
    }
  }
  return out;
}

int max_degrade_levels(const io::Image& img) {
  io::validate_image(img);
  const unsigned min_dim = static_cast<unsigned>(std::min(img.width, img.height));
  return std::bit_width(min_dim) - 2;  // floor(log2(min_dim)) - 1
}

io::Image degrade(const io::Image& img, int levels) {
  io::validate_image(img);
  if (levels < 0 || levels > max_degrade_levels(img)) {
    fail(ErrorCode::too_many_levels,
         "levels " + std::to_string(levels) + " exceeds limit " +
             std::to_string(max_degrade_levels(img)) + " for " + std::to_string(img.width) +
             "x" + std::to_string(img.height));
  }
  if (levels == 0) return img;
  std::vector<io::GrayPlane> planes;
  planes.reserve(img.channels);
  for (int ch = 0; ch < img.channels; ++ch) {
    io::GrayPlane plane = io::channel_plane(img, ch);
    for (int l = 0; l < levels; ++l) {
      plane = pyr_up(pyr_down(plane), img.height, img.width);
    }
    planes.push_back(std::move(plane));
  }
  return io::planes_to_image(planes);
}

}  // namespace driftcurate::distort
