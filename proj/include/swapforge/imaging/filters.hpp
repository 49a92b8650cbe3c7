#pragma once

#include "swapforge/imaging/image.hpp"

namespace swapforge::imaging {

/// 5-point Laplacian 4c - up - down - left - right with replicate border.
/// Single-channel input only; the result is not clamped.
ImageBuf laplacian(const ImageBuf& img);

/// Mean filter over a (2r+1)^2 window, replicate border.
ImageBuf box_blur(const ImageBuf& img, int radius);

}  // namespace swapforge::imaging
