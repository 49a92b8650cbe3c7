#include "swapforge/model/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "swapforge/alignment/face_template.hpp"
#include "swapforge/errors.hpp"
#include "swapforge/imaging/io.hpp"

namespace swapforge::model {

namespace {

using imaging::Point2;

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

struct Ellipse {
    double cx, cy, ax, ay;
    // Squared normalized radius; < 1 inside.
    double r2(double x, double y) const {
        const double u = (x - cx) / ax, v = (y - cy) / ay;
        return u * u + v * v;
    }
};

struct FaceGeometry {
    Ellipse face, eye_r, eye_l, mouth;
};

FaceGeometry template_geometry(double eye_open, double mouth_open) {
    const auto& t = alignment::face_template_2d();
    double jx0 = 1e9, jx1 = -1e9, jy1 = -1e9, by0 = 1e9;
    for (int i = 0; i <= 16; ++i) {
        jx0 = std::min(jx0, t[i].x);
        jx1 = std::max(jx1, t[i].x);
        jy1 = std::max(jy1, t[i].y);
    }
    for (int i = 17; i <= 26; ++i) by0 = std::min(by0, t[i].y);
    FaceGeometry g;
    const double top = by0 - 0.25 * (jy1 - by0);
    g.face = {(jx0 + jx1) / 2, (top + jy1) / 2, (jx1 - jx0) / 2 * 1.02, (jy1 - top) / 2};
    auto eye = [&](int a, int b) {
        const Point2 c0 = t[a], c1 = t[b];
        const double ax = std::hypot(c1.x - c0.x, c1.y - c0.y) / 2 * 1.15;
        return Ellipse{(c0.x + c1.x) / 2, (c0.y + c1.y) / 2, ax, ax * 0.55 * eye_open};
    };
    g.eye_r = eye(36, 39);
    g.eye_l = eye(42, 45);
    double mx0 = 1e9, mx1 = -1e9, my0 = 1e9, my1 = -1e9;
    for (int i = 48; i <= 59; ++i) {
        mx0 = std::min(mx0, t[i].x);
        mx1 = std::max(mx1, t[i].x);
        my0 = std::min(my0, t[i].y);
        my1 = std::max(my1, t[i].y);
    }
    const double max_ = (mx1 - mx0) / 2;
    g.mouth = {(mx0 + mx1) / 2, (my0 + my1) / 2, max_, std::max((my1 - my0) / 2, max_ * 0.35) * mouth_open};
    return g;
}

struct Palette {
    double skin[3], lip[3];
};

Palette palette(Identity id, std::mt19937_64& rng) {
    Palette p{};
    const double j0 = uniform(rng, -0.05, 0.05), j1 = uniform(rng, -0.05, 0.05), j2 = uniform(rng, -0.05, 0.05);
    if (id == Identity::A) {
        p.skin[0] = 0.85 + j0, p.skin[1] = 0.45 + j1, p.skin[2] = 0.30 + j2;
        p.lip[0] = 0.60, p.lip[1] = 0.12, p.lip[2] = 0.15;
    } else {
        p.skin[0] = 0.30 + j0, p.skin[1] = 0.45 + j1, p.skin[2] = 0.85 + j2;
        p.lip[0] = 0.15, p.lip[1] = 0.12, p.lip[2] = 0.60;
    }
    return p;
}

std::string record_id(Identity id, int i) {
    std::ostringstream s;
    s << (id == Identity::A ? "a" : "b") << std::setw(5) << std::setfill('0') << i;
    return s.str();
}

}  // namespace

SyntheticFace render_synthetic_face(Identity id, std::mt19937_64& rng, const SyntheticOptions& opt) {
    if (opt.size < 16) throw InvalidArgument("synthetic: size must be >= 16");
    const int n = opt.size;
    const double rot = uniform(rng, -1, 1) * opt.rotation_deg * std::numbers::pi / 180.0;
    const double scale = opt.face_scale * n / 512.0 * (1.0 + uniform(rng, -1, 1) * opt.scale_jitter);
    const double sx = uniform(rng, -1, 1) * opt.shift_jitter * n;
    const double sy = uniform(rng, -1, 1) * opt.shift_jitter * n;
    const double eye_open = uniform(rng, 0.6, 1.0);
    const double mouth_open = uniform(rng, 0.7, 1.6);
    const Palette pal = palette(id, rng);
    const double bg0[3] = {uniform(rng, 0.15, 0.35), uniform(rng, 0.25, 0.45), uniform(rng, 0.15, 0.35)};
    const double bg_dir = uniform(rng, 0, 2 * std::numbers::pi);
    const double stripe_freq = uniform(rng, 0.15, 0.35);
    const double stripe_dir = uniform(rng, 0, std::numbers::pi);
    const std::uint64_t noise_seed = rng();

    // Template (512 space, centred at 256) -> canvas.
    const double c = std::cos(rot) * scale, s = std::sin(rot) * scale;
    const imaging::SimilarityTransform t{scale, rot, n / 2.0 + sx - (c * 256 - s * 256),
                                         n / 2.0 + sy - (s * 256 + c * 256)};
    const auto inv = t.inverse();
    const FaceGeometry g = template_geometry(eye_open, mouth_open);

    SyntheticFace f;
    f.image = imaging::ImageBuf(n, n, 3);
    f.face = imaging::MaskBuf(n, n);
    f.eye = imaging::MaskBuf(n, n);
    f.mouth = imaging::MaskBuf(n, n);
    f.landmarks = imaging::transform_landmarks(alignment::face_template_2d(), t);

    std::mt19937_64 noise(noise_seed);
    const double bdx = std::cos(bg_dir), bdy = std::sin(bg_dir);
    const double sdx = std::cos(stripe_dir), sdy = std::sin(stripe_dir);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const Point2 p = inv.apply({x + 0.5, y + 0.5});
            double rgb[3];
            // Background: smooth gradient, optionally with high-frequency clutter.
            const double ramp = ((x - n / 2.0) * bdx + (y - n / 2.0) * bdy) / n;
            const double nz = uniform(noise, -1, 1);
            for (int k = 0; k < 3; ++k) rgb[k] = bg0[k] + 0.15 * ramp + 0.02 * nz;
            if (opt.cluttered_background) {
                const double stripes = std::sin((x * sdx + y * sdy) * stripe_freq * 2 * std::numbers::pi);
                const double cl = stripes > 0 ? 0.35 : -0.15;
                for (int k = 0; k < 3; ++k) rgb[k] += cl + 0.12 * uniform(noise, -1, 1);
            }
            const double rf = g.face.r2(p.x, p.y);
            if (rf < 1.0) {
                f.face.at(y, x) = 1.0f;
                const double shade = 0.8 + 0.2 * (1.0 - rf) - 0.08 * (p.y - g.face.cy) / g.face.ay;
                for (int k = 0; k < 3; ++k) rgb[k] = pal.skin[k] * shade;
                for (const Ellipse* e : {&g.eye_r, &g.eye_l}) {
                    const double re = e->r2(p.x, p.y);
                    if (re < 1.0) {
                        const double iris = std::hypot(p.x - e->cx, p.y - e->cy) / e->ay;
                        const double v = iris < 0.8 ? 0.08 : 0.95;
                        for (int k = 0; k < 3; ++k) rgb[k] = v;
                    }
                    const Ellipse grown{e->cx, e->cy, e->ax * 1.4, std::max(e->ay, e->ax * 0.4) * 1.6};
                    if (grown.r2(p.x, p.y) < 1.0) f.eye.at(y, x) = 1.0f;
                }
                const double rm = g.mouth.r2(p.x, p.y);
                if (rm < 1.0) {
                    const double v = 0.75 + 0.25 * rm;
                    for (int k = 0; k < 3; ++k) rgb[k] = pal.lip[k] * v;
                }
                const Ellipse grown_m{g.mouth.cx, g.mouth.cy, g.mouth.ax * 1.25, g.mouth.ay * 1.5};
                if (grown_m.r2(p.x, p.y) < 1.0) f.mouth.at(y, x) = 1.0f;
            }
            for (int k = 0; k < 3; ++k) f.image.at(k, y, x) = static_cast<float>(std::clamp(rgb[k], 0.0, 1.0));
        }
    }
    return f;
}

void write_synthetic_faceset(const std::filesystem::path& dir, Identity id, int count, std::uint64_t seed,
                             const SyntheticOptions& opt, double wrong_identity_fraction, int embedding_dim) {
    if (count < 0) throw InvalidArgument("synthetic: count must be >= 0");
    if (embedding_dim < 1) throw InvalidArgument("synthetic: embedding_dim must be >= 1");
    std::filesystem::create_directories(dir);
    std::mt19937_64 rng(seed);
    // Identity cluster centres are fixed so A and B facesets agree on them.
    std::mt19937_64 centre_rng(0x5eed);
    std::vector<std::vector<double>> centres(2, std::vector<double>(embedding_dim));
    for (auto& c : centres)
        for (auto& v : c) v = uniform(centre_rng, -1, 1);
    for (int i = 0; i < count; ++i) {
        const bool wrong = uniform(rng, 0, 1) < wrong_identity_fraction;
        const Identity who = wrong ? (id == Identity::A ? Identity::B : Identity::A) : id;
        const SyntheticFace f = render_synthetic_face(who, rng, opt);
        const std::string rid = record_id(id, i);
        imaging::write_png(dir / (rid + ".png"), f.image);
        imaging::write_landmarks(dir / (rid + ".json"), f.landmarks);
        imaging::write_mask_png(dir / (rid + "_face.png"), f.face);
        imaging::write_mask_png(dir / (rid + "_eye.png"), f.eye);
        imaging::write_mask_png(dir / (rid + "_mouth.png"), f.mouth);
        std::vector<float> emb(embedding_dim);
        for (int d = 0; d < embedding_dim; ++d)
            emb[d] = static_cast<float>(centres[static_cast<int>(who)][d] + uniform(rng, -0.05, 0.05));
        imaging::write_f32_vector(dir / (rid + ".f32"), emb);
    }
}

}  // namespace swapforge::model
