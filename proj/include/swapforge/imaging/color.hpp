#pragma once

#include "swapforge/imaging/image.hpp"

namespace swapforge::imaging {

/// Rec.601 luma. Single-channel input is returned unchanged.
ImageBuf rgb_to_gray(const ImageBuf& img);

/// sRGB in [0,1] -> CIE L*a*b* (D65). Planes hold L* in [0,100], a*, b*.
ImageBuf rgb_to_lab(const ImageBuf& img);

/// Inverse of rgb_to_lab; the result is clamped to [0,1].
ImageBuf lab_to_rgb(const ImageBuf& lab);

/// Replicates a single channel into three.
ImageBuf gray_to_rgb(const ImageBuf& img);

}  // namespace swapforge::imaging
