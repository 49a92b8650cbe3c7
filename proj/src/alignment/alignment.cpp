#include "swapforge/alignment/alignment.hpp"

#include <cmath>

#include "swapforge/errors.hpp"

namespace swapforge::alignment {

using imaging::Landmarks68;
using imaging::Point2;
using imaging::SimilarityTransform;

SimilarityTransform estimate_alignment(const Landmarks68& lm, const Landmarks68& target) {
    if (!imaging::landmarks_finite(lm) || !imaging::landmarks_finite(target)) {
        throw InvalidArgument("estimate_alignment: non-finite landmarks");
    }
    const double n = static_cast<double>(lm.size());
    Point2 mu_src, mu_dst;
    for (std::size_t i = 0; i < lm.size(); ++i) {
        mu_src.x += lm[i].x / n;
        mu_src.y += lm[i].y / n;
        mu_dst.x += target[i].x / n;
        mu_dst.y += target[i].y / n;
    }

    // Cross-covariance  S = 1/n sum (dst - mu_dst)(src - mu_src)^T
    double var_src = 0.0;
    double sxx = 0.0, sxy = 0.0, syx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lm.size(); ++i) {
        const double ax = lm[i].x - mu_src.x, ay = lm[i].y - mu_src.y;
        const double bx = target[i].x - mu_dst.x, by = target[i].y - mu_dst.y;
        var_src += (ax * ax + ay * ay) / n;
        sxx += bx * ax / n;
        sxy += bx * ay / n;
        syx += by * ax / n;
        syy += by * ay / n;
    }
    if (!(var_src > 1e-12)) throw NumericalDegeneracy("estimate_alignment: landmarks have zero variance");

    // Polar factor of S restricted to SO(2): the rotation maximising tr(R^T S).
    const double cos_term = sxx + syy;
    const double sin_term = syx - sxy;
    const double norm = std::hypot(cos_term, sin_term);
    if (!(norm > 1e-12 * var_src)) {
        throw NumericalDegeneracy("estimate_alignment: cross-covariance has no rotational component");
    }
    SimilarityTransform t;
    t.rotation = std::atan2(sin_term, cos_term);
    t.scale = norm / var_src;
    const double c = t.scale * std::cos(t.rotation);
    const double s = t.scale * std::sin(t.rotation);
    t.tx = mu_dst.x - (c * mu_src.x - s * mu_src.y);
    t.ty = mu_dst.y - (s * mu_src.x + c * mu_src.y);
    return t;
}

SimilarityTransform estimate_alignment(const Landmarks68& lm) {
    return estimate_alignment(lm, face_template_2d());
}

AlignmentResult align_face(const imaging::ImageBuf& img, const Landmarks68& lm) {
    AlignmentResult r;
    r.transform = estimate_alignment(lm);
    r.aligned_image = imaging::warp_similarity(img, r.transform, kAlignedSize, kAlignedSize,
                                               imaging::Interp::bilinear);
    r.aligned_landmarks = imaging::transform_landmarks(lm, r.transform);
    return r;
}

double mean_landmark_error(const Landmarks68& a, const Landmarks68& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::hypot(a[i].x - b[i].x, a[i].y - b[i].y);
    return sum / static_cast<double>(a.size());
}

CropWindow central_crop_window(int side) {
    const int size = static_cast<int>(std::lround(0.8 * side));
    return {(side - size) / 2, size};
}

imaging::ImageBuf train_crop(const imaging::ImageBuf& img512, int out_size) {
    if (img512.height() != kAlignedSize || img512.width() != kAlignedSize) {
        throw InvalidArgument("train_crop: expects a 512x512 aligned image");
    }
    const CropWindow w = central_crop_window(kAlignedSize);
    return imaging::resize_bilinear(imaging::crop(img512, w.offset, w.offset, w.size, w.size), out_size,
                                    out_size);
}

imaging::MaskBuf train_crop(const imaging::MaskBuf& mask512, int out_size) {
    if (mask512.height() != kAlignedSize || mask512.width() != kAlignedSize) {
        throw InvalidArgument("train_crop: expects a 512x512 aligned mask");
    }
    const CropWindow w = central_crop_window(kAlignedSize);
    imaging::MaskBuf window(w.size, w.size);
    for (int y = 0; y < w.size; ++y)
        for (int x = 0; x < w.size; ++x) window.at(y, x) = mask512.at(w.offset + y, w.offset + x);
    return imaging::resize_mask(window, out_size, out_size, imaging::Interp::nearest);
}

}  // namespace swapforge::alignment
