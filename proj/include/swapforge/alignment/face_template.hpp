#pragma once

#include <array>

#include "swapforge/imaging/geometry.hpp"

namespace swapforge::alignment {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

using Template3d = std::array<Point3, imaging::kNumLandmarks>;

/// Canonical frontal 68-point face. Units: inter-ocular distance 0.4;
/// x right, y down (image convention), z away from the camera. Symmetric
/// under x -> -x with the standard mirror permutation.
const Template3d& face_template_3d();

inline constexpr int kAlignedSize = 512;
inline constexpr double kInterOcularFraction = 0.38;

/// The 3D template projected frontally into 512x512 aligned space: eye
/// centres 0.38*512 px apart, centroid at the canvas centre.
const imaging::Landmarks68& face_template_2d();

/// Midpoints of landmarks 36-41 and 42-47.
imaging::Point2 right_eye_center(const imaging::Landmarks68& lm);
imaging::Point2 left_eye_center(const imaging::Landmarks68& lm);

}  // namespace swapforge::alignment
