#include "swapforge/model/augment.hpp"

#include <cmath>
#include <numbers>

#include "swapforge/errors.hpp"
#include "swapforge/imaging/color.hpp"
#include "swapforge/imaging/geometry.hpp"

namespace swapforge::model {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

std::uint64_t splitmix(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
    return splitmix(splitmix(splitmix(splitmix(base) ^ a) ^ b) ^ c);
}

AugmentConfig AugmentConfig::disabled() {
    AugmentConfig c;
    c.clahe_prob = 0.0;
    c.lab_light_range = 0.0;
    c.lab_color_range = 0.0;
    c.rot_max = 0.0;
    c.scale_min = 1.0;
    c.scale_max = 1.0;
    c.trans_max = 0.0;
    c.warp_strength = 0.0;
    return c;
}

void AugmentConfig::validate() const {
    if (!(clahe_prob >= 0.0 && clahe_prob <= 1.0)) throw InvalidArgument("augment: clahe_prob must be in [0,1]");
    if (lab_light_range < 0 || lab_color_range < 0 || rot_max < 0 || trans_max < 0 || warp_strength < 0) {
        throw InvalidArgument("augment: ranges must be non-negative");
    }
    if (!(scale_min > 0.0 && scale_min <= scale_max)) throw InvalidArgument("augment: need 0 < scale_min <= scale_max");
    if (warp_grid < 2) throw InvalidArgument("augment: warp_grid must be >= 2");
}

bool warp_enabled(long step, long total_steps) noexcept { return 2 * step < total_steps; }

void random_grid_field(int h, int w, int grid, double strength, std::mt19937_64& rng, std::vector<float>& dx,
                       std::vector<float>& dy) {
    std::vector<double> gx(static_cast<std::size_t>(grid) * grid, 0.0), gy(gx.size(), 0.0);
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const double rx = uniform(rng, -1.0, 1.0), ry = uniform(rng, -1.0, 1.0);
            if (i == 0 || j == 0 || i == grid - 1 || j == grid - 1) continue;
            gx[static_cast<std::size_t>(i) * grid + j] = rx * strength * w;
            gy[static_cast<std::size_t>(i) * grid + j] = ry * strength * h;
        }
    }
    dx.assign(static_cast<std::size_t>(h) * w, 0.0f);
    dy.assign(dx.size(), 0.0f);
    for (int y = 0; y < h; ++y) {
        const double fy = (y + 0.5) / h * (grid - 1);
        const int i0 = std::min(static_cast<int>(fy), grid - 2);
        const double ty = fy - i0;
        for (int x = 0; x < w; ++x) {
            const double fx = (x + 0.5) / w * (grid - 1);
            const int j0 = std::min(static_cast<int>(fx), grid - 2);
            const double tx = fx - j0;
            auto lerp2 = [&](const std::vector<double>& g) {
                const double a = g[static_cast<std::size_t>(i0) * grid + j0];
                const double b = g[static_cast<std::size_t>(i0) * grid + j0 + 1];
                const double c = g[static_cast<std::size_t>(i0 + 1) * grid + j0];
                const double d = g[static_cast<std::size_t>(i0 + 1) * grid + j0 + 1];
                return (1 - ty) * ((1 - tx) * a + tx * b) + ty * ((1 - tx) * c + tx * d);
            };
            dx[static_cast<std::size_t>(y) * w + x] = static_cast<float>(lerp2(gx));
            dy[static_cast<std::size_t>(y) * w + x] = static_cast<float>(lerp2(gy));
        }
    }
}

AugmentedSample augment(const imaging::ImageBuf& img, const std::vector<imaging::MaskBuf>& masks, long step,
                        const AugmentConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    if (img.channels() != 3) throw InvalidArgument("augment: expected an RGB image");
    for (const auto& m : masks)
        if (!m.same_size(img)) throw InvalidArgument("augment: mask size differs from image");

    // Fixed draw order.
    const double u_clahe = uniform(rng, 0.0, 1.0);
    const double dl = uniform(rng, -1.0, 1.0) * cfg.lab_light_range;
    const double da = uniform(rng, -1.0, 1.0) * cfg.lab_color_range;
    const double db = uniform(rng, -1.0, 1.0) * cfg.lab_color_range;
    const double rot = uniform(rng, -1.0, 1.0) * cfg.rot_max * std::numbers::pi / 180.0;
    const double scale = uniform(rng, cfg.scale_min, cfg.scale_max);
    const double tx = uniform(rng, -1.0, 1.0) * cfg.trans_max * img.width();
    const double ty = uniform(rng, -1.0, 1.0) * cfg.trans_max * img.height();
    std::vector<float> fdx, fdy;
    random_grid_field(img.height(), img.width(), cfg.warp_grid, cfg.warp_strength, rng, fdx, fdy);

    imaging::ImageBuf base = img;
    if (u_clahe < cfg.clahe_prob) base = clahe(base, cfg.clahe);
    if (dl != 0.0 || da != 0.0 || db != 0.0) {
        auto lab = imaging::rgb_to_lab(base);
        for (auto& v : lab.plane(0)) v = static_cast<float>(std::clamp(v + dl, 0.0, 100.0));
        for (auto& v : lab.plane(1)) v = static_cast<float>(v + da);
        for (auto& v : lab.plane(2)) v = static_cast<float>(v + db);
        base = imaging::lab_to_rgb(lab);
    }

    AugmentedSample out;
    out.masks = masks;
    if (rot != 0.0 || scale != 1.0 || tx != 0.0 || ty != 0.0) {
        // Similarity about the image centre.
        const double cx = img.width() / 2.0, cy = img.height() / 2.0;
        const double c = std::cos(rot) * scale, s = std::sin(rot) * scale;
        imaging::SimilarityTransform t{scale, rot, cx - (c * cx - s * cy) + tx, cy - (s * cx + c * cy) + ty};
        base = imaging::warp_similarity(base, t, img.height(), img.width(), imaging::Interp::bilinear);
        for (auto& m : out.masks) m = imaging::warp_similarity(m, t, img.height(), img.width(), imaging::Interp::nearest);
    }
    out.target = base;
    out.input = base;
    if (warp_enabled(step, cfg.total_steps) && cfg.warp_strength > 0.0) {
        out.input = imaging::remap(base, fdx, fdy, imaging::Interp::bilinear);
    }
    return out;
}

}  // namespace swapforge::model
