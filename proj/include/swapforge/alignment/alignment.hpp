#pragma once

#include "swapforge/alignment/face_template.hpp"
#include "swapforge/imaging/geometry.hpp"
#include "swapforge/imaging/image.hpp"

namespace swapforge::alignment {

struct AlignmentResult {
    imaging::SimilarityTransform transform;  // source frame -> aligned space
    imaging::ImageBuf aligned_image;
    imaging::Landmarks68 aligned_landmarks;
};

/// Least-squares similarity (rotation, uniform scale, translation; no
/// reflection) mapping `lm` onto `target`. Throws NumericalDegeneracy when
/// `lm` has zero spread.
imaging::SimilarityTransform estimate_alignment(const imaging::Landmarks68& lm,
                                                const imaging::Landmarks68& target);

/// Shorthand for alignment onto face_template_2d().
imaging::SimilarityTransform estimate_alignment(const imaging::Landmarks68& lm);

/// Warps the face into the 512x512 canonical canvas (bilinear).
AlignmentResult align_face(const imaging::ImageBuf& img, const imaging::Landmarks68& lm);

/// Mean Euclidean distance between corresponding landmarks.
double mean_landmark_error(const imaging::Landmarks68& a, const imaging::Landmarks68& b);

struct CropWindow {
    int offset;  // first row/column
    int size;    // side length
};

/// Central 80% of a side: size round(0.8*n), offset floor((n-size)/2).
/// For n = 512 this is [51, 461).
CropWindow central_crop_window(int side);

inline constexpr int kTrainCropSize = 256;

/// Central 80% window of a 512x512 aligned image, bilinear-resized to
/// out_size (256 by default).
imaging::ImageBuf train_crop(const imaging::ImageBuf& img512, int out_size = kTrainCropSize);
imaging::MaskBuf train_crop(const imaging::MaskBuf& mask512, int out_size = kTrainCropSize);

}  // namespace swapforge::alignment
