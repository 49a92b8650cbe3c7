#pragma once

#include "swapforge/imaging/geometry.hpp"
#include "swapforge/imaging/image.hpp"

namespace swapforge::curation {

/// Population variance of the Laplacian of the grayscale image, with
/// intensities scaled to 0-255 before filtering (so thresholds carry the
/// familiar 8-bit magnitudes). Throws InvalidArgument on an empty image.
double blur_score(const imaging::ImageBuf& img);

/// Longest side of the landmark bounding box, in pixels.
double face_size(const imaging::Landmarks68& lm);

}  // namespace swapforge::curation
