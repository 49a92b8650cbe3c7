#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "swapforge/imaging/image.hpp"

namespace swapforge::imaging {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point2&) const = default;
};

inline constexpr std::size_t kNumLandmarks = 68;

/// 68 facial landmarks in pixel coordinates, standard 68-point ordering
/// (jaw 0-16, brows 17-26, nose 27-35, eyes 36-47, mouth 48-67).
using Landmarks68 = std::array<Point2, kNumLandmarks>;

/// p -> scale * R(rotation) * p + (tx, ty), in continuous pixel coordinates
/// where pixel (i, j) covers [j, j+1) x [i, i+1).
struct SimilarityTransform {
    double scale = 1.0;
    double rotation = 0.0;  // radians
    double tx = 0.0;
    double ty = 0.0;

    static SimilarityTransform identity() { return {}; }

    Point2 apply(Point2 p) const noexcept;
    /// Throws InvalidArgument when scale <= 0.
    SimilarityTransform inverse() const;
    bool invertible() const noexcept;
};

/// Returns a∘b, i.e. p -> a(b(p)).
SimilarityTransform compose(const SimilarityTransform& a, const SimilarityTransform& b);

Landmarks68 transform_landmarks(const Landmarks68& lm, const SimilarityTransform& t);

/// Horizontal mirror about x = axis_x with the left/right index permutation
/// applied, so the result is again a valid 68-point annotation.
Landmarks68 mirror_landmarks(const Landmarks68& lm, double axis_x);

/// Index of each landmark's mirror partner.
const std::array<int, kNumLandmarks>& landmark_mirror_permutation();

bool landmarks_finite(const Landmarks68& lm) noexcept;

enum class Interp { nearest, bilinear };

/// Samples img at a continuous position (pixel-center convention). Positions
/// more than half a pixel outside the image return 0.
float sample(const ImageBuf& img, int channel, double x, double y, Interp interp) noexcept;
float sample(const MaskBuf& mask, double x, double y, Interp interp) noexcept;

/// Output pixel q takes the source value at inverse(t)(q).
ImageBuf warp_similarity(const ImageBuf& img, const SimilarityTransform& t, int out_height,
                         int out_width, Interp interp = Interp::bilinear);
MaskBuf warp_similarity(const MaskBuf& mask, const SimilarityTransform& t, int out_height,
                        int out_width, Interp interp = Interp::nearest);

ImageBuf resize_bilinear(const ImageBuf& img, int out_height, int out_width);
MaskBuf resize_mask(const MaskBuf& mask, int out_height, int out_width, Interp interp);

/// Dense remap: output (y, x) samples img at (x + dx[y,x], y + dy[y,x]).
ImageBuf remap(const ImageBuf& img, std::span<const float> dx, std::span<const float> dy,
               Interp interp = Interp::bilinear);

}  // namespace swapforge::imaging
