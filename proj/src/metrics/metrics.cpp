#include "swapforge/metrics/metrics.hpp"

#include "swapforge/errors.hpp"

namespace swapforge::metrics {

void LossWeights::validate() const {
    if (!(lambda_eye >= 0.0) || !(lambda_mouth >= 0.0)) throw InvalidArgument("LossWeights: weights must be >= 0");
}

double mse(const imaging::ImageBuf& x, const imaging::ImageBuf& y) {
    if (!x.same_shape(y)) throw InvalidArgument("mse: shape mismatch");
    if (x.empty()) throw InvalidArgument("mse: empty image");
    double s = 0.0;
    const auto a = x.data(), b = y.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - b[i];
        s += d * d;
    }
    return s / static_cast<double>(a.size());
}

double recon_loss(const imaging::ImageBuf& x, const imaging::ImageBuf& y, const SsimParams& p) {
    return dssim(x, y, p) + mse(x, y);
}

double masked_loss(const imaging::ImageBuf& x, const imaging::ImageBuf& y, const imaging::MaskBuf& face,
                   const imaging::MaskBuf& eye, const imaging::MaskBuf& mouth, const LossWeights& w,
                   const SsimParams& p) {
    w.validate();
    if (!x.same_shape(y)) throw InvalidArgument("masked_loss: shape mismatch");
    if (!face.same_size(x) || !eye.same_size(x) || !mouth.same_size(x)) {
        throw InvalidArgument("masked_loss: mask size differs from images");
    }
    auto term = [&](const imaging::MaskBuf& m) {
        return recon_loss(imaging::apply_mask(x, m), imaging::apply_mask(y, m), p);
    };
    return term(face) + w.lambda_eye * term(eye) + w.lambda_mouth * term(mouth);
}

double skewed_accuracy(double acc_fake, double acc_real, const SkewWeights& w) {
    if (!(acc_fake >= 0.0 && acc_fake <= 1.0 && acc_real >= 0.0 && acc_real <= 1.0)) {
        throw InvalidArgument("skewed_accuracy: accuracies must lie in [0, 1]");
    }
    return w.fake * acc_fake + w.real * acc_real;
}

}  // namespace swapforge::metrics
