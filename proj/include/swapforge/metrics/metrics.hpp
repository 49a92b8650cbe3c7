#pragma once

#include "swapforge/imaging/image.hpp"
#include "swapforge/metrics/ssim.hpp"

namespace swapforge::metrics {

/// Weights of the eye and mouth reconstruction terms.
struct LossWeights {
    double lambda_eye = 3.0;
    double lambda_mouth = 2.0;

    void validate() const;
};

/// Mean over all samples of (x - y)^2.
double mse(const imaging::ImageBuf& x, const imaging::ImageBuf& y);

/// dssim + mse.
double recon_loss(const imaging::ImageBuf& x, const imaging::ImageBuf& y, const SsimParams& p = {});

/// recon(x*Mf, y*Mf) + lambda_eye * recon(x*Me, y*Me) + lambda_mouth * recon(x*Mm, y*Mm).
/// Masks multiply every channel of both inputs.
double masked_loss(const imaging::ImageBuf& x, const imaging::ImageBuf& y, const imaging::MaskBuf& face,
                   const imaging::MaskBuf& eye, const imaging::MaskBuf& mouth, const LossWeights& w = {},
                   const SsimParams& p = {});

/// Validation selection score l1 * acc_fake + l2 * acc_real.
struct SkewWeights {
    double fake = 1.0;
    double real = 3.0;
};
double skewed_accuracy(double acc_fake, double acc_real, const SkewWeights& w = {});

}  // namespace swapforge::metrics
