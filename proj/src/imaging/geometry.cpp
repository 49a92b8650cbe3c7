#include "swapforge/imaging/geometry.hpp"

#include <cmath>

#include "swapforge/errors.hpp"

namespace swapforge::imaging {

Point2 SimilarityTransform::apply(Point2 p) const noexcept {
    const double c = scale * std::cos(rotation);
    const double s = scale * std::sin(rotation);
    return {c * p.x - s * p.y + tx, s * p.x + c * p.y + ty};
}

bool SimilarityTransform::invertible() const noexcept {
    return scale > 0.0 && std::isfinite(scale) && std::isfinite(rotation) && std::isfinite(tx) &&
           std::isfinite(ty);
}

SimilarityTransform SimilarityTransform::inverse() const {
    if (!invertible()) throw InvalidArgument("SimilarityTransform: scale must be positive");
    SimilarityTransform inv;
    inv.scale = 1.0 / scale;
    inv.rotation = -rotation;
    // inverse translation = -(1/s) R^T t
    const double c = std::cos(rotation) / scale;
    const double s = std::sin(rotation) / scale;
    inv.tx = -(c * tx + s * ty);
    inv.ty = -(-s * tx + c * ty);
    return inv;
}

SimilarityTransform compose(const SimilarityTransform& a, const SimilarityTransform& b) {
    SimilarityTransform out;
    out.scale = a.scale * b.scale;
    out.rotation = std::remainder(a.rotation + b.rotation, 2.0 * M_PI);
    const Point2 t = a.apply({b.tx, b.ty});
    out.tx = t.x;
    out.ty = t.y;
    return out;
}

Landmarks68 transform_landmarks(const Landmarks68& lm, const SimilarityTransform& t) {
    Landmarks68 out;
    for (std::size_t i = 0; i < kNumLandmarks; ++i) out[i] = t.apply(lm[i]);
    return out;
}

const std::array<int, kNumLandmarks>& landmark_mirror_permutation() {
    static const std::array<int, kNumLandmarks> perm = {
        16, 15, 14, 13, 12, 11, 10, 9,  8,  7,  6,  5,  4,  3,  2,  1,  0,  26, 25, 24, 23, 22, 21,
        20, 19, 18, 17, 27, 28, 29, 30, 35, 34, 33, 32, 31, 45, 44, 43, 42, 47, 46, 39, 38, 37, 36,
        41, 40, 54, 53, 52, 51, 50, 49, 48, 59, 58, 57, 56, 55, 64, 63, 62, 61, 60, 67, 66, 65};
    return perm;
}

Landmarks68 mirror_landmarks(const Landmarks68& lm, double axis_x) {
    const auto& perm = landmark_mirror_permutation();
    Landmarks68 out;
    for (std::size_t i = 0; i < kNumLandmarks; ++i) {
        const Point2 p = lm[static_cast<std::size_t>(perm[i])];
        out[i] = {2.0 * axis_x - p.x, p.y};
    }
    return out;
}

bool landmarks_finite(const Landmarks68& lm) noexcept {
    for (const auto& p : lm)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
    return true;
}

namespace {

// Bilinear taps are border-replicated; the half-pixel rim outside the image
// is treated as inside so nearest and bilinear share one support.
template <typename At>
float sample_impl(int h, int w, double x, double y, Interp interp, At at) noexcept {
    if (!(x >= 0.0 && x < w && y >= 0.0 && y < h)) return 0.0f;
    if (interp == Interp::nearest) {
        return at(static_cast<int>(std::floor(y)), static_cast<int>(std::floor(x)));
    }
    const double fx = x - 0.5;
    const double fy = y - 0.5;
    const int x0 = static_cast<int>(std::floor(fx));
    const int y0 = static_cast<int>(std::floor(fy));
    const double ax = fx - x0;
    const double ay = fy - y0;
    auto clampi = [](int v, int n) { return v < 0 ? 0 : (v >= n ? n - 1 : v); };
    const int xa = clampi(x0, w), xb = clampi(x0 + 1, w);
    const int ya = clampi(y0, h), yb = clampi(y0 + 1, h);
    const double top = (1.0 - ax) * at(ya, xa) + ax * at(ya, xb);
    const double bot = (1.0 - ax) * at(yb, xa) + ax * at(yb, xb);
    return static_cast<float>((1.0 - ay) * top + ay * bot);
}

}  // namespace

float sample(const ImageBuf& img, int channel, double x, double y, Interp interp) noexcept {
    return sample_impl(img.height(), img.width(), x, y, interp,
                       [&](int yy, int xx) { return img.at(channel, yy, xx); });
}

float sample(const MaskBuf& mask, double x, double y, Interp interp) noexcept {
    return sample_impl(mask.height(), mask.width(), x, y, interp,
                       [&](int yy, int xx) { return mask.at(yy, xx); });
}

ImageBuf warp_similarity(const ImageBuf& img, const SimilarityTransform& t, int out_height,
                         int out_width, Interp interp) {
    if (img.empty()) throw InvalidArgument("warp_similarity: empty image");
    if (out_height <= 0 || out_width <= 0) throw InvalidArgument("warp_similarity: bad output size");
    const SimilarityTransform inv = t.inverse();
    ImageBuf out(out_height, out_width, img.channels());
    for (int y = 0; y < out_height; ++y) {
        for (int x = 0; x < out_width; ++x) {
            const Point2 src = inv.apply({x + 0.5, y + 0.5});
            for (int c = 0; c < img.channels(); ++c) out.at(c, y, x) = sample(img, c, src.x, src.y, interp);
        }
    }
    return out;
}

MaskBuf warp_similarity(const MaskBuf& mask, const SimilarityTransform& t, int out_height,
                        int out_width, Interp interp) {
    if (mask.empty()) throw InvalidArgument("warp_similarity: empty mask");
    if (out_height <= 0 || out_width <= 0) throw InvalidArgument("warp_similarity: bad output size");
    const SimilarityTransform inv = t.inverse();
    MaskBuf out(out_height, out_width);
    for (int y = 0; y < out_height; ++y) {
        for (int x = 0; x < out_width; ++x) {
            const Point2 src = inv.apply({x + 0.5, y + 0.5});
            out.at(y, x) = sample(mask, src.x, src.y, interp);
        }
    }
    return out;
}

ImageBuf resize_bilinear(const ImageBuf& img, int out_height, int out_width) {
    if (img.empty() || out_height <= 0 || out_width <= 0) throw InvalidArgument("resize_bilinear: bad size");
    if (out_height == img.height() && out_width == img.width()) return img;
    const double sy = static_cast<double>(img.height()) / out_height;
    const double sx = static_cast<double>(img.width()) / out_width;
    ImageBuf out(out_height, out_width, img.channels());
    for (int c = 0; c < img.channels(); ++c)
        for (int y = 0; y < out_height; ++y)
            for (int x = 0; x < out_width; ++x)
                out.at(c, y, x) = sample(img, c, (x + 0.5) * sx, (y + 0.5) * sy, Interp::bilinear);
    return out;
}

MaskBuf resize_mask(const MaskBuf& mask, int out_height, int out_width, Interp interp) {
    if (mask.empty() || out_height <= 0 || out_width <= 0) throw InvalidArgument("resize_mask: bad size");
    if (out_height == mask.height() && out_width == mask.width()) return mask;
    const double sy = static_cast<double>(mask.height()) / out_height;
    const double sx = static_cast<double>(mask.width()) / out_width;
    MaskBuf out(out_height, out_width);
    for (int y = 0; y < out_height; ++y)
        for (int x = 0; x < out_width; ++x)
            out.at(y, x) = sample(mask, (x + 0.5) * sx, (y + 0.5) * sy, interp);
    return out;
}

ImageBuf remap(const ImageBuf& img, std::span<const float> dx, std::span<const float> dy, Interp interp) {
    if (dx.size() != img.plane_size() || dy.size() != img.plane_size()) {
        throw InvalidArgument("remap: displacement field size mismatch");
    }
    ImageBuf out(img.height(), img.width(), img.channels());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * img.width() + x;
            const double sx = x + 0.5 + dx[i];
            const double sy = y + 0.5 + dy[i];
            for (int c = 0; c < img.channels(); ++c) out.at(c, y, x) = sample(img, c, sx, sy, interp);
        }
    }
    return out;
}

}  // namespace swapforge::imaging
