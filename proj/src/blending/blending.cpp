#include "swapforge/blending/blending.hpp"

#include "swapforge/errors.hpp"
#include "swapforge/imaging/morphology.hpp"

namespace swapforge::blending {

void BlendJob::validate() const {
    if (source.empty() || target.empty()) throw InvalidArgument("blend: empty source or target");
    if (!source.same_shape(target)) throw InvalidArgument("blend: source and target differ in shape");
    if (!driver_mask.same_size(target) || !generated_mask.same_size(target)) {
        throw InvalidArgument("blend: masks must match the image size");
    }
    if (!driver_mask.is_binary() || !generated_mask.is_binary()) throw InvalidArgument("blend: masks must be binary");
    if (squeeze_px < 0) throw InvalidArgument("blend: squeeze_px must be >= 0");
}

imaging::MaskBuf build_blend_mask(const BlendJob& job) {
    job.validate();
    return imaging::intersect_masks(imaging::erode_mask(job.driver_mask, job.squeeze_px),
                                    imaging::erode_mask(job.generated_mask, job.squeeze_px));
}

imaging::MaskBuf conventional_blend_mask(const BlendJob& job) {
    job.validate();
    return job.driver_mask;
}

imaging::ImageBuf hard_paste(const imaging::ImageBuf& source, const imaging::ImageBuf& target,
                             const imaging::MaskBuf& mask) {
    if (!source.same_shape(target) || !mask.same_size(target)) throw InvalidArgument("hard_paste: size mismatch");
    imaging::ImageBuf out = target;
    for (int c = 0; c < out.channels(); ++c)
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (mask.data()[i] >= 0.5f) out.plane(c)[i] = source.plane(c)[i];
    return out;
}

double boundary_energy(const imaging::ImageBuf& img, const imaging::MaskBuf& mask) {
    if (!mask.same_size(img)) throw InvalidArgument("boundary_energy: mask size differs from image");
    const int h = img.height(), w = img.width();
    double sum = 0.0;
    std::size_t pairs = 0;
    constexpr int dy[4] = {-1, 1, 0, 0}, dx[4] = {0, 0, -1, 1};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (mask.at(y, x) < 0.5f) continue;
            for (int k = 0; k < 4; ++k) {
                const int qy = y + dy[k], qx = x + dx[k];
                if (qy < 0 || qy >= h || qx < 0 || qx >= w || mask.at(qy, qx) >= 0.5f) continue;
                for (int c = 0; c < img.channels(); ++c) {
                    const double d = static_cast<double>(img.at(c, y, x)) - img.at(c, qy, qx);
                    sum += d * d;
                }
                ++pairs;
            }
        }
    }
    return pairs == 0 ? 0.0 : sum / (static_cast<double>(pairs) * img.channels());
}

BlendOutput blend(const BlendJob& job, bool conventional, const SolverParams& params) {
    BlendOutput out;
    out.mask = conventional ? conventional_blend_mask(job) : build_blend_mask(job);
    out.mask = imaging::clear_border(out.mask, 1);
    out.image = poisson_blend(job.source, job.target, out.mask, params, &out.stats);
    return out;
}

}  // namespace swapforge::blending
