#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "swapforge/errors.hpp"
#include "swapforge/imaging/color.hpp"
#include "swapforge/imaging/filters.hpp"
#include "swapforge/imaging/geometry.hpp"
#include "swapforge/imaging/io.hpp"
#include "swapforge/imaging/morphology.hpp"

using namespace swapforge;
using namespace swapforge::imaging;

namespace {

MaskBuf rect_mask(int h, int w, int y0, int x0, int rh, int rw) {
    MaskBuf m(h, w);
    for (int y = y0; y < y0 + rh; ++y)
        for (int x = x0; x < x0 + rw; ++x) m.at(y, x) = 1.0f;
    return m;
}

MaskBuf random_mask(int h, int w, std::mt19937_64& rng, double p = 0.7) {
    MaskBuf m(h, w);
    for (auto& v : m.data()) v = oracle::uniform(rng) < p ? 1.0f : 0.0f;
    return m;
}

}  // namespace

TEST_CASE("containers validate their invariants") {
    CHECK_THROWS_AS(ImageBuf(2, 2, 1, std::vector<float>(3)), InvalidArgument);
    CHECK_THROWS_AS(ImageBuf(1, 1, 1, std::vector<float>{NAN}), InvalidArgument);
    CHECK_THROWS_AS(MaskBuf(1, 1, std::vector<float>{1.5f}), InvalidArgument);
    MaskBuf m(2, 2, std::vector<float>{0, 1, 0.5f, 1});
    CHECK_FALSE(m.is_binary());
    CHECK(m.binarized().is_binary());
    CHECK(m.count_set() == 3);
}

TEST_CASE("warp_similarity identity is exact for both interpolators") {
    std::mt19937_64 rng(1);
    const auto img = oracle::random_image(13, 17, 3, rng);
    CHECK(warp_similarity(img, SimilarityTransform::identity(), 13, 17, Interp::bilinear) == img);
    CHECK(warp_similarity(img, SimilarityTransform::identity(), 13, 17, Interp::nearest) == img);
    const auto m = random_mask(13, 17, rng);
    CHECK(warp_similarity(m, SimilarityTransform::identity(), 13, 17) == m);
}

TEST_CASE("warp_similarity translation shifts rows with zero fill") {
    ImageBuf ramp(8, 8, 1);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) ramp.at(0, y, x) = static_cast<float>(x + 8 * y) / 64.0f;
    const auto out = warp_similarity(ramp, {1.0, 0.0, 3.0, 0.0}, 8, 8, Interp::nearest);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) CHECK(out.at(0, y, x) == (x < 3 ? 0.0f : ramp.at(0, y, x - 3)));
}

TEST_CASE("warp_similarity scale 2 block-replicates a checkerboard") {
    ImageBuf cb(2, 2, 1, std::vector<float>{1, 0, 0, 1});
    const auto out = warp_similarity(cb, {2.0, 0.0, 0.0, 0.0}, 4, 4, Interp::nearest);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) CHECK(out.at(0, y, x) == cb.at(0, y / 2, x / 2));
}

TEST_CASE("warp_similarity rejects non-invertible transforms") {
    ImageBuf img(4, 4, 1);
    CHECK_THROWS_AS(warp_similarity(img, {0.0, 0.0, 0.0, 0.0}, 4, 4), InvalidArgument);
    CHECK_THROWS_AS(warp_similarity(img, {-1.0, 0.0, 0.0, 0.0}, 4, 4), InvalidArgument);
}

TEST_CASE("similarity compose with inverse is identity") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; ++i) {
        SimilarityTransform t{oracle::uniform(rng, 0.2, 5), oracle::uniform(rng, -3, 3), oracle::uniform(rng, -50, 50),
                              oracle::uniform(rng, -50, 50)};
        const auto id = compose(t, t.inverse());
        CHECK(std::abs(id.scale - 1) < 1e-9);
        CHECK(std::abs(id.rotation) < 1e-9);
        CHECK(std::abs(id.tx) < 1e-9);
        CHECK(std::abs(id.ty) < 1e-9);
    }
}

TEST_CASE("erode_mask basic cases") {
    std::mt19937_64 rng(3);
    const auto m = random_mask(20, 20, rng);
    CHECK(erode_mask(m, 0) == m);

    const auto sq = erode_mask(rect_mask(100, 100, 25, 25, 50, 50), 15);
    CHECK(sq == rect_mask(100, 100, 40, 40, 20, 20));

    MaskBuf dot(5, 5);
    dot.at(2, 2) = 1.0f;
    CHECK(erode_mask(dot, 1).count_set() == 0);
    CHECK(erode_mask(rect_mask(10, 10, 0, 0, 10, 10), 20).count_set() == 0);
    CHECK_THROWS_AS(erode_mask(m, -1), InvalidArgument);
}

TEST_CASE("erode_mask matches a brute-force L-infinity erosion and composes") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        const auto m = random_mask(23, 19, rng, 0.85);
        const int r = 1 + trial % 3;
        const auto e = erode_mask(m, r);
        for (int y = 0; y < 23; ++y)
            for (int x = 0; x < 19; ++x) {
                bool all = true;
                for (int dy = -r; dy <= r; ++dy)
                    for (int dx = -r; dx <= r; ++dx) {
                        const int yy = y + dy, xx = x + dx;
                        if (yy < 0 || yy >= 23 || xx < 0 || xx >= 19 || m.at(yy, xx) < 0.5f) all = false;
                    }
                CHECK(e.at(y, x) == (all ? 1.0f : 0.0f));
            }
        CHECK(erode_mask(erode_mask(m, 1), r) == erode_mask(m, r + 1));
    }
}

TEST_CASE("intersect_masks algebra") {
    std::mt19937_64 rng(5);
    const auto a = random_mask(12, 9, rng), b = random_mask(12, 9, rng), c = random_mask(12, 9, rng);
    CHECK(intersect_masks(a, a) == a);
    CHECK(intersect_masks(a, MaskBuf(12, 9, 1.0f)) == a);
    CHECK(intersect_masks(a, b) == intersect_masks(b, a));
    CHECK(intersect_masks(intersect_masks(a, b), c) == intersect_masks(a, intersect_masks(b, c)));
    CHECK(intersect_masks(rect_mask(10, 10, 0, 0, 4, 4), rect_mask(10, 10, 5, 5, 4, 4)).count_set() == 0);
    CHECK_THROWS_AS(intersect_masks(a, MaskBuf(3, 3)), InvalidArgument);
}

TEST_CASE("laplacian stencil") {
    ImageBuf flat(6, 6, 1, 0.3f);
    const auto lap = laplacian(flat);
    for (float v : lap.data()) CHECK(v == 0.0f);

    ImageBuf ramp(6, 7, 1);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 7; ++x) ramp.at(0, y, x) = 0.1f * x + 0.05f * y;
    const auto lr = laplacian(ramp);
    for (int y = 1; y < 5; ++y)
        for (int x = 1; x < 6; ++x) CHECK(std::abs(lr.at(0, y, x)) < 1e-6f);

    ImageBuf imp(3, 3, 1);
    imp.at(0, 1, 1) = 1.0f;
    const auto li = laplacian(imp);
    CHECK(li.at(0, 1, 1) == 4.0f);
    CHECK(li.at(0, 0, 1) == -1.0f);
    CHECK(li.at(0, 1, 0) == -1.0f);
    CHECK(li.at(0, 2, 1) == -1.0f);
    CHECK(li.at(0, 1, 2) == -1.0f);
    CHECK(li.at(0, 0, 0) == 0.0f);

    CHECK_THROWS_AS(laplacian(ImageBuf(3, 3, 3)), InvalidArgument);
}

TEST_CASE("Lab conversion") {
    ImageBuf white(1, 1, 3, 1.0f);
    const auto lw = rgb_to_lab(white);
    CHECK(lw.at(0, 0, 0) == doctest::Approx(100.0).epsilon(1e-4));
    CHECK(std::abs(lw.at(1, 0, 0)) < 1e-3);
    CHECK(std::abs(lw.at(2, 0, 0)) < 1e-3);
    CHECK(std::abs(rgb_to_lab(ImageBuf(1, 1, 3, 0.0f)).at(0, 0, 0)) < 1e-6);

    std::mt19937_64 rng(6);
    const auto colors = oracle::random_image(10, 10, 3, rng);
    const auto back = lab_to_rgb(rgb_to_lab(colors));
    double worst = 0.0;
    for (std::size_t i = 0; i < colors.size(); ++i)
        worst = std::max(worst, static_cast<double>(std::abs(back.data()[i] - colors.data()[i])));
    CHECK(worst < 1e-3);
    CHECK_THROWS_AS(rgb_to_lab(ImageBuf(2, 2, 1)), InvalidArgument);
    CHECK(rgb_to_gray(ImageBuf(1, 1, 3, 0.5f)).at(0, 0, 0) == doctest::Approx(0.5));
}

TEST_CASE("PNG and landmark files round-trip") {
    const auto dir = std::filesystem::temp_directory_path() / "swapforge_test_io";
    std::filesystem::remove_all(dir);
    ImageBuf img(5, 4, 3);
    for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = static_cast<float>(i % 256) / 255.0f;
    write_png(dir / "a.png", img);
    CHECK(read_png(dir / "a.png") == img);
    CHECK(encode_png(img).size() > 8);

    MaskBuf m(4, 4);
    m.at(1, 2) = 1.0f;
    write_mask_png(dir / "m.png", m);
    CHECK(read_mask_png(dir / "m.png") == m);

    Landmarks68 lm{};
    for (std::size_t i = 0; i < lm.size(); ++i) lm[i] = {i * 1.5, 100.0 - i};
    write_landmarks(dir / "lm.json", lm);
    const auto back = read_landmarks(dir / "lm.json");
    for (std::size_t i = 0; i < lm.size(); ++i) {
        CHECK(back[i].x == lm[i].x);
        CHECK(back[i].y == lm[i].y);
    }
    write_f32_vector(dir / "e.f32", {1.0f, -2.5f});
    CHECK(read_f32_vector(dir / "e.f32") == std::vector<float>{1.0f, -2.5f});
    CHECK_THROWS_AS(read_png(dir / "missing.png"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("mirror_landmarks is an involution") {
    std::mt19937_64 rng(7);
    Landmarks68 lm{};
    for (auto& p : lm) p = {oracle::uniform(rng, 0, 100), oracle::uniform(rng, 0, 100)};
    const auto twice = mirror_landmarks(mirror_landmarks(lm, 50.0), 50.0);
    for (std::size_t i = 0; i < lm.size(); ++i) {
        CHECK(twice[i].x == doctest::Approx(lm[i].x));
        CHECK(twice[i].y == doctest::Approx(lm[i].y));
    }
}

TEST_CASE("resize_bilinear keeps constants") {
    ImageBuf c(7, 9, 3, 0.25f);
    const auto r = resize_bilinear(c, 20, 3);
    for (float v : r.data()) CHECK(v == doctest::Approx(0.25f));
}
