#pragma once

#include "driftcurate/image.hpp"

namespace driftcurate::distort {

// Halve both dims by non-overlapping 2x2 block means; odd trailing row/column dropped.
io::GrayPlane pyr_down(const io::GrayPlane& plane);

// Nearest-pixel upscale: out(i,j) = in(min(i/2, h-1), min(j/2, w-1)).
io::GrayPlane pyr_up(const io::GrayPlane& plane, int target_h, int target_w);

// Largest level count degrade() accepts for this image.
int max_degrade_levels(const io::Image& img);

// Per channel: pyr_down then pyr_up back to the original dims, `levels` times.
io::Image degrade(const io::Image& img, int levels);

}  // namespace driftcurate::distort
