#pragma once

#include <span>
#include <vector>

#include "swapforge/imaging/image.hpp"

namespace swapforge::metrics {

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;

    double c1() const noexcept { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const noexcept { return (k2 * dynamic_range) * (k2 * dynamic_range); }
    /// Throws InvalidArgument unless window is odd and >= 3 and sigma > 0.
    void validate() const;
};

/// Normalised 1-D Gaussian taps; the 2-D window is their outer product.
std::vector<double> gaussian_taps(int window, double sigma);

/// Local SSIM over every full window position ("valid" region), mean of the
/// map per channel, averaged over channels. Inputs must share a shape and be
/// at least window x window.
double ssim(const imaging::ImageBuf& x, const imaging::ImageBuf& y, const SsimParams& p = {});

/// (1 - ssim) / 2.
double dssim(const imaging::ImageBuf& x, const imaging::ImageBuf& y, const SsimParams& p = {});

namespace detail {

/// Mean SSIM of one plane pair. When grad_x / grad_y are non-empty they
/// receive d(mean SSIM)/d(input) scaled by `grad_scale` (accumulated).
double ssim_plane(std::span<const double> x, std::span<const double> y, int height, int width,
                  const SsimParams& p, std::span<double> grad_x = {}, std::span<double> grad_y = {},
                  double grad_scale = 1.0);

}  // namespace detail

}  // namespace swapforge::metrics
