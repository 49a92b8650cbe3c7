#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "swapforge/imaging/image.hpp"
#include "swapforge/model/clahe.hpp"

namespace swapforge::model {

inline constexpr double kDefaultClaheProbability = 0.5;

struct AugmentConfig {
    double clahe_prob = kDefaultClaheProbability;
    ClaheParams clahe;
    double lab_light_range = 10.0;  // L* units
    double lab_color_range = 5.0;   // a*, b* units
    double rot_max = 10.0;          // degrees
    double scale_min = 0.95;
    double scale_max = 1.05;
    double trans_max = 0.05;        // fraction of the image side
    int warp_grid = 5;              // control points per side
    double warp_strength = 0.025;   // max displacement, fraction of the side
    long total_steps = 0;
    std::uint64_t seed = 7;

    /// Every knob off: the augmentation is the identity.
    static AugmentConfig disabled();
    void validate() const;
};

/// Grid warping is applied during the first half of training only.
bool warp_enabled(long step, long total_steps) noexcept;

struct AugmentedSample {
    imaging::ImageBuf input;
    imaging::ImageBuf target;
    std::vector<imaging::MaskBuf> masks;  // affine-transformed like the target
};

/// CLAHE (with probability clahe_prob) -> Lab jitter -> random similarity
/// shared by input, target and masks -> grid warp of the input only while
/// warp_enabled(step, cfg.total_steps). The same random numbers are drawn
/// whatever knobs are enabled, so results depend only on the rng state.
AugmentedSample augment(const imaging::ImageBuf& img, const std::vector<imaging::MaskBuf>& masks, long step,
                        const AugmentConfig& cfg, std::mt19937_64& rng);

/// Dense displacement field from a random grid of control points; border
/// control points stay fixed. Returns dx and dy planes of h*w samples.
void random_grid_field(int h, int w, int grid, double strength, std::mt19937_64& rng, std::vector<float>& dx,
                       std::vector<float>& dy);

/// Deterministic per-sample seed derived from a base seed and indices.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) noexcept;

}  // namespace swapforge::model
