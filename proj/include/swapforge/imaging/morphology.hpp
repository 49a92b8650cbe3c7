#pragma once

#include "swapforge/imaging/image.hpp"

namespace swapforge::imaging {

/// Binary erosion with a (2r+1)x(2r+1) square element; pixels beyond the
/// image border count as 0. Values >= 0.5 are treated as set.
MaskBuf erode_mask(const MaskBuf& mask, int radius);

/// Pointwise minimum. Throws InvalidArgument on size mismatch.
MaskBuf intersect_masks(const MaskBuf& a, const MaskBuf& b);

/// Clears a frame of `width` pixels along the image border.
MaskBuf clear_border(const MaskBuf& mask, int width = 1);

}  // namespace swapforge::imaging
