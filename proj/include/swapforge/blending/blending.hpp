#pragma once

#include <cstddef>

#include "swapforge/imaging/image.hpp"

namespace swapforge::blending {

inline constexpr int kDefaultSqueezePx = 15;

/// Everything needed for one composite, all in aligned space.
struct BlendJob {
    imaging::ImageBuf source;  // generated face
    imaging::ImageBuf target;  // driver frame region
    imaging::MaskBuf driver_mask;
    imaging::MaskBuf generated_mask;
    int squeeze_px = kDefaultSqueezePx;

    /// Throws InvalidArgument unless all buffers share dimensions, masks are
    /// binary and squeeze_px >= 0.
    void validate() const;
};

enum class SolverMethod { conjugate_gradient };

struct SolverParams {
    double tol = 1e-6;       // relative residual |r| / |b|
    std::size_t max_iter = 0;  // 0 selects 10 * unknowns
    SolverMethod method = SolverMethod::conjugate_gradient;
    bool clamp_output = true;

    void validate() const;
};

struct SolveStats {
    std::size_t unknowns = 0;
    std::size_t iterations = 0;  // summed over channels
    double residual = 0.0;       // worst final relative residual over channels
};

/// erode(driver, squeeze) ∩ erode(generated, squeeze).
imaging::MaskBuf build_blend_mask(const BlendJob& job);

/// The driver mask alone: squeeze 0 and no generated-mask intersection.
imaging::MaskBuf conventional_blend_mask(const BlendJob& job);

/// Gradient-domain compositing of source into target over mask (binary,
/// forced off a 1-px border). Inside the region the 5-point Laplacian of the
/// result matches the source, with Dirichlet values from the target on the
/// boundary; outside it the target is returned unchanged. Each channel is
/// solved by Jacobi-preconditioned conjugate gradients starting from the
/// target. Throws SolverFailure when tol is not reached within max_iter.
imaging::ImageBuf poisson_blend(const imaging::ImageBuf& source, const imaging::ImageBuf& target,
                                const imaging::MaskBuf& mask, const SolverParams& params = {},
                                SolveStats* stats = nullptr);

/// Source inside the mask, target elsewhere.
imaging::ImageBuf hard_paste(const imaging::ImageBuf& source, const imaging::ImageBuf& target,
                             const imaging::MaskBuf& mask);

/// Mean over channels and 4-neighbour pairs (p inside, q outside the mask)
/// of (img(p) - img(q))^2. Zero when the mask has no boundary.
double boundary_energy(const imaging::ImageBuf& img, const imaging::MaskBuf& mask);

struct BlendOutput {
    imaging::ImageBuf image;
    imaging::MaskBuf mask;
    SolveStats stats;
};

/// Builds the blend mask (advanced or conventional) and runs poisson_blend.
BlendOutput blend(const BlendJob& job, bool conventional = false, const SolverParams& params = {});

}  // namespace swapforge::blending
