#include <cmath>
#include <random>

#include "composites.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "swapforge/blending/blending.hpp"
#include "swapforge/errors.hpp"
#include "swapforge/imaging/morphology.hpp"

using namespace swapforge;
using namespace swapforge::blending;
using imaging::ImageBuf;
using imaging::MaskBuf;

namespace {

MaskBuf blob_mask(int h, int w, std::mt19937_64& rng) {
    MaskBuf m(h, w);
    const double cx = oracle::uniform(rng, 0.35, 0.65) * w, cy = oracle::uniform(rng, 0.35, 0.65) * h;
    const double rx = oracle::uniform(rng, 0.2, 0.35) * w, ry = oracle::uniform(rng, 0.2, 0.35) * h;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double u = (x + 0.5 - cx) / rx, v = (y + 0.5 - cy) / ry;
            if (u * u + v * v < 1.0 || oracle::uniform(rng) < 0.05) m.at(y, x) = 1.0f;
        }
    return m;
}

SolverParams exact() {
    SolverParams p;
    p.tol = 1e-10;
    p.clamp_output = false;
    return p;
}

double max_diff(const ImageBuf& a, const ImageBuf& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, double(std::abs(a.data()[i] - b.data()[i])));
    return d;
}

}  // namespace

TEST_CASE("blend masks") {
    CHECK(kDefaultSqueezePx == 15);
    std::mt19937_64 rng(61);
    BlendJob job;
    job.source = oracle::random_image(64, 64, 3, rng);
    job.target = oracle::random_image(64, 64, 3, rng);
    job.driver_mask = blob_mask(64, 64, rng);
    job.generated_mask = blob_mask(64, 64, rng);
    job.squeeze_px = 3;
    CHECK(build_blend_mask(job) == imaging::intersect_masks(imaging::erode_mask(job.driver_mask, 3),
                                                            imaging::erode_mask(job.generated_mask, 3)));
    CHECK(conventional_blend_mask(job) == job.driver_mask);
    job.squeeze_px = 0;
    job.generated_mask = job.driver_mask;
    CHECK(build_blend_mask(job) == job.driver_mask);
    CHECK(BlendJob{}.squeeze_px == 15);

    job.driver_mask.at(3, 3) = 0.5f;
    CHECK_THROWS_AS(job.validate(), InvalidArgument);
    job.driver_mask = MaskBuf(10, 10);
    CHECK_THROWS_AS(job.validate(), InvalidArgument);
}

TEST_CASE("poisson_blend with source equal to target returns the target exactly") {
    std::mt19937_64 rng(62);
    const auto t = oracle::random_image(40, 40, 3, rng);
    const auto m = blob_mask(40, 40, rng);
    CHECK(poisson_blend(t, t, m) == t);
}

TEST_CASE("poisson_blend matches a dense direct solve") {
    std::mt19937_64 rng(63);
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = oracle::random_image(18, 18, 3, rng);
        const auto t = oracle::random_image(18, 18, 3, rng);
        MaskBuf m(18, 18);
        for (int y = 1; y < 17; ++y)
            for (int x = 1; x < 17; ++x) m.at(y, x) = oracle::uniform(rng) < 0.8 ? 1.0f : 0.0f;
        SolveStats st;
        const auto out = poisson_blend(s, t, m, exact(), &st);
        CHECK(st.unknowns > 0);
        double err = 0;
        for (int c = 0; c < 3; ++c) {
            const auto ref = oracle::poisson_dense(s, t, m, c);
            for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(ref[i] - out.plane(c)[i]));
        }
        CHECK(err < 1e-6);
    }
}

TEST_CASE("poisson_blend invariants") {
    std::mt19937_64 rng(64);
    const auto s = oracle::smooth_image(48, 48, 3, rng);
    const auto s2 = oracle::smooth_image(48, 48, 3, rng);
    const auto t = oracle::smooth_image(48, 48, 3, rng);
    const auto m = blob_mask(48, 48, rng);
    const auto mb = imaging::clear_border(m);

    // Constant offset: identical gradients, so the target comes back.
    auto shifted = t;
    for (auto& v : shifted.data()) v += 0.1f;
    CHECK(max_diff(poisson_blend(shifted, t, m, exact()), t) < 1e-5);

    // Locality: untouched outside the mask.
    const auto out = poisson_blend(s, t, m, exact());
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < 48; ++y)
            for (int x = 0; x < 48; ++x)
                if (mb.at(y, x) < 0.5f) CHECK(out.at(c, y, x) == t.at(c, y, x));

    // Idempotent.
    CHECK(max_diff(poisson_blend(out, out, m, exact()), out) < 1e-6);

    // Linear in the source.
    const float a = 0.3f;
    ImageBuf mix(48, 48, 3);
    for (std::size_t i = 0; i < mix.size(); ++i) mix.data()[i] = a * s.data()[i] + (1 - a) * s2.data()[i];
    const auto o1 = poisson_blend(s, t, m, exact()), o2 = poisson_blend(s2, t, m, exact());
    ImageBuf lin(48, 48, 3);
    for (std::size_t i = 0; i < lin.size(); ++i) lin.data()[i] = a * o1.data()[i] + (1 - a) * o2.data()[i];
    CHECK(max_diff(poisson_blend(mix, t, m, exact()), lin) < 1e-5);

    // Border pixels are never unknowns.
    const MaskBuf full(48, 48, 1.0f);
    const auto fo = poisson_blend(s, t, full, exact());
    for (int x = 0; x < 48; ++x) CHECK(fo.at(0, 0, x) == t.at(0, 0, x));
    CHECK(poisson_blend(s, t, MaskBuf(48, 48)) == t);
}

TEST_CASE("solver failure is reported") {
    std::mt19937_64 rng(65);
    const auto s = oracle::random_image(32, 32, 1, rng);
    const auto t = oracle::random_image(32, 32, 1, rng);
    SolverParams p;
    p.tol = 1e-12;
    p.max_iter = 2;
    CHECK_THROWS_AS(poisson_blend(s, t, MaskBuf(32, 32, 1.0f), p), SolverFailure);
    p.tol = 0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("boundary_energy") {
    CHECK(boundary_energy(ImageBuf(10, 10, 3, 0.4f), MaskBuf(10, 10, 1.0f)) == 0.0);
    std::mt19937_64 rng(66);
    const auto s = oracle::random_image(12, 12, 2, rng);
    const auto t = oracle::random_image(12, 12, 2, rng);
    MaskBuf left(12, 12);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 6; ++x) left.at(y, x) = 1.0f;
    const auto pasted = hard_paste(s, t, left);
    double e = 0;
    for (int c = 0; c < 2; ++c)
        for (int y = 0; y < 12; ++y) e += std::pow(double(s.at(c, y, 5)) - t.at(c, y, 6), 2);
    CHECK(boundary_energy(pasted, left) == doctest::Approx(e / 24).epsilon(1e-9));
}

TEST_CASE("poisson blending lowers seam energy relative to a hard paste") {
    std::mt19937_64 rng(67);
    int ok = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = oracle::smooth_image(40, 40, 3, rng);
        const auto t = oracle::smooth_image(40, 40, 3, rng);
        const auto m = imaging::clear_border(blob_mask(40, 40, rng));
        if (boundary_energy(poisson_blend(s, t, m), m) <= boundary_energy(hard_paste(s, t, m), m)) ++ok;
    }
    CHECK(ok == 20);
}

TEST_CASE("squeezed intersection beats the driver mask on cluttered composites") {
    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto c = make_composite(seed, 256, 8);
        BlendJob job{c.source, c.target, c.driver_mask, c.generated_mask, 8};
        const auto adv = blend(job, false);
        const auto conv = blend(job, true);
        if (boundary_energy(adv.image, adv.mask) <= boundary_energy(conv.image, conv.mask)) ++wins;
    }
    CHECK(wins == 4);
}
