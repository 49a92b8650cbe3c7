#include "swapforge/imaging/color.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "swapforge/errors.hpp"

namespace swapforge::imaging {

namespace {

constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.00000;
constexpr double kWhiteZ = 1.08883;
constexpr double kDelta = 6.0 / 29.0;

double srgb_to_linear(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
    return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) {
    return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_finv(double t) {
    return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0);
}

void require_rgb(const ImageBuf& img, const char* fn) {
    if (img.channels() != 3) throw InvalidArgument(std::string(fn) + ": expects 3 channels");
}

}  // namespace

ImageBuf rgb_to_gray(const ImageBuf& img) {
    if (img.empty()) throw InvalidArgument("rgb_to_gray: empty image");
    if (img.channels() == 1) return img;
    require_rgb(img, "rgb_to_gray");
    ImageBuf out(img.height(), img.width(), 1);
    auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
    auto o = out.plane(0);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = 0.299f * r[i] + 0.587f * g[i] + 0.114f * b[i];
    return out;
}

ImageBuf rgb_to_lab(const ImageBuf& img) {
    require_rgb(img, "rgb_to_lab");
    std::vector<float> out(img.size());
    const std::size_t n = img.plane_size();
    auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
    for (std::size_t i = 0; i < n; ++i) {
        const double rl = srgb_to_linear(r[i]);
        const double gl = srgb_to_linear(g[i]);
        const double bl = srgb_to_linear(b[i]);
        const double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
        const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
        const double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
        const double fx = lab_f(x / kWhiteX), fy = lab_f(y / kWhiteY), fz = lab_f(z / kWhiteZ);
        out[i] = static_cast<float>(116.0 * fy - 16.0);
        out[n + i] = static_cast<float>(500.0 * (fx - fy));
        out[2 * n + i] = static_cast<float>(200.0 * (fy - fz));
    }
    return ImageBuf(img.height(), img.width(), 3, std::move(out));
}

ImageBuf lab_to_rgb(const ImageBuf& lab) {
    require_rgb(lab, "lab_to_rgb");
    ImageBuf out(lab.height(), lab.width(), 3);
    const std::size_t n = lab.plane_size();
    auto L = lab.plane(0), A = lab.plane(1), B = lab.plane(2);
    auto r = out.plane(0), g = out.plane(1), b = out.plane(2);
    for (std::size_t i = 0; i < n; ++i) {
        const double fy = (L[i] + 16.0) / 116.0;
        const double fx = fy + A[i] / 500.0;
        const double fz = fy - B[i] / 200.0;
        const double x = kWhiteX * lab_finv(fx);
        const double y = kWhiteY * lab_finv(fy);
        const double z = kWhiteZ * lab_finv(fz);
        const double rl = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
        const double gl = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
        const double bl = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
        r[i] = static_cast<float>(std::clamp(linear_to_srgb(std::max(rl, 0.0)), 0.0, 1.0));
        g[i] = static_cast<float>(std::clamp(linear_to_srgb(std::max(gl, 0.0)), 0.0, 1.0));
        b[i] = static_cast<float>(std::clamp(linear_to_srgb(std::max(bl, 0.0)), 0.0, 1.0));
    }
    return out;
}

ImageBuf gray_to_rgb(const ImageBuf& img) {
    if (img.channels() == 3) return img;
    if (img.channels() != 1) throw InvalidArgument("gray_to_rgb: expects 1 channel");
    ImageBuf out(img.height(), img.width(), 3);
    for (int c = 0; c < 3; ++c) std::copy(img.plane(0).begin(), img.plane(0).end(), out.plane(c).begin());
    return out;
}

}  // namespace swapforge::imaging
