#pragma once

#include "swapforge/alignment/face_template.hpp"
#include "swapforge/imaging/geometry.hpp"

namespace swapforge::curation {

/// Head pose in degrees, each in (-180, 180]. Rotation convention:
/// R = Ry(yaw) * Rx(pitch) * Rz(roll) acting on template coordinates
/// (x right, y down, z away from camera).
struct Pose {
    double yaw = 0.0;
    double pitch = 0.0;
    double roll = 0.0;
};

/// Scaled-orthographic least-squares fit of the 3D template to the 2D
/// landmarks. Throws NumericalDegeneracy for collinear landmarks.
Pose estimate_pose(const imaging::Landmarks68& lm, const alignment::Template3d& tmpl);
Pose estimate_pose(const imaging::Landmarks68& lm);

/// Orthographic projection of the template rotated by `pose`, scaled and
/// shifted into image space. Inverse of estimate_pose for noise-free input.
imaging::Landmarks68 project_template(const alignment::Template3d& tmpl, const Pose& pose,
                                      double scale, imaging::Point2 offset);

}  // namespace swapforge::curation
