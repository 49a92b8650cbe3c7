#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "swapforge/errors.hpp"
#include "swapforge/metrics/loss_ad.hpp"
#include "swapforge/metrics/metrics.hpp"
#include "swapforge/metrics/ssim.hpp"
#include "swapforge/nn/ops.hpp"

using namespace swapforge;
using namespace swapforge::metrics;
using imaging::ImageBuf;
using imaging::MaskBuf;

namespace {

MaskBuf random_mask(int h, int w, std::mt19937_64& rng) {
    MaskBuf m(h, w);
    for (auto& v : m.data()) v = oracle::uniform(rng) < 0.5 ? 1.0f : 0.0f;
    return m;
}

}  // namespace

TEST_CASE("mse") {
    ImageBuf a(2, 2, 1, 0.0f), b(2, 2, 1, 0.0f);
    b.at(0, 0, 0) = 1.0f;
    CHECK(mse(a, b) == doctest::Approx(0.25));
    CHECK(mse(a, a) == 0.0);
    CHECK_THROWS_AS(mse(a, ImageBuf(2, 3, 1)), InvalidArgument);
}

TEST_CASE("ssim matches the literal sliding-window oracle") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 5; ++t) {
        const auto x = oracle::random_image(32, 32, 3, rng);
        const auto y = oracle::random_image(32, 32, 3, rng);
        CHECK(std::abs(ssim(x, y) - oracle::ssim_bruteforce(x, y)) < 1e-6);
    }
    const auto s = oracle::smooth_image(24, 20, 1, rng);
    const auto u = oracle::smooth_image(24, 20, 1, rng);
    CHECK(std::abs(ssim(s, u) - oracle::ssim_bruteforce(s, u)) < 1e-6);
}

TEST_CASE("ssim closed forms and bounds") {
    const SsimParams p;
    CHECK(ssim(ImageBuf(16, 16, 1, 0.0f), ImageBuf(16, 16, 1, 1.0f)) ==
          doctest::Approx(p.c1() / (1 + p.c1())).epsilon(1e-12));
    std::mt19937_64 rng(32);
    const auto x = oracle::random_image(20, 20, 3, rng);
    CHECK(ssim(x, x) == 1.0);
    CHECK(dssim(x, x) == 0.0);
    const auto y = oracle::random_image(20, 20, 3, rng);
    CHECK(dssim(x, y) == doctest::Approx((1 - ssim(x, y)) / 2));
    CHECK(ssim(x, y) == doctest::Approx(ssim(y, x)).epsilon(1e-12));
    CHECK_THROWS_AS(ssim(ImageBuf(8, 8, 1), ImageBuf(8, 8, 1)), InvalidArgument);
    SsimParams even;
    even.window = 10;
    CHECK_THROWS_AS(even.validate(), InvalidArgument);
    const auto taps = gaussian_taps(11, 1.5);
    double s = 0;
    for (double t : taps) s += t;
    CHECK(s == doctest::Approx(1.0));
    CHECK(taps[0] == doctest::Approx(taps[10]));
}

TEST_CASE("masked_loss identities") {
    std::mt19937_64 rng(33);
    const auto x = oracle::random_image(32, 32, 3, rng);
    const auto y = oracle::random_image(32, 32, 3, rng);
    const MaskBuf ones(32, 32, 1.0f), zeros(32, 32, 0.0f);
    const LossWeights w{3.0, 2.0};
    CHECK(std::abs(masked_loss(x, y, ones, ones, ones, w) - 6 * recon_loss(x, y)) < 1e-9);
    const auto m = random_mask(32, 32, rng);
    CHECK(masked_loss(x, x, m, ones, m) == 0.0);
    CHECK(masked_loss(x, y, ones, zeros, zeros) == doctest::Approx(recon_loss(x, y)));
    CHECK(recon_loss(x, y) == doctest::Approx(dssim(x, y) + mse(x, y)));
    const LossWeights d;
    CHECK(d.lambda_eye == 3.0);
    CHECK(d.lambda_mouth == 2.0);
    LossWeights neg{-1.0, 2.0};
    CHECK_THROWS_AS(neg.validate(), InvalidArgument);
}

TEST_CASE("skewed accuracy") {
    CHECK(skewed_accuracy(0.5, 0.9, {1.0, 3.0}) == doctest::Approx(3.2).epsilon(1e-12));
    CHECK(skewed_accuracy(0.5, 0.9) == doctest::Approx(3.2).epsilon(1e-12));
    CHECK(skewed_accuracy(0.0, 0.0) == 0.0);
}

TEST_CASE("autodiff loss agrees with the image-domain loss") {
    std::mt19937_64 rng(34);
    std::vector<ImageBuf> xs, ys;
    std::vector<MaskBuf> face, eye, mouth;
    for (int n = 0; n < 2; ++n) {
        xs.push_back(oracle::random_image(16, 16, 3, rng));
        ys.push_back(oracle::random_image(16, 16, 3, rng));
        face.push_back(random_mask(16, 16, rng));
        eye.push_back(random_mask(16, 16, rng));
        mouth.push_back(random_mask(16, 16, rng));
    }
    SsimParams p;
    p.window = 7;
    const auto l = masked_loss(images_to_tensor<double>(xs), images_to_tensor<double>(ys),
                               masks_to_tensor<double>(face, 3), masks_to_tensor<double>(eye, 3),
                               masks_to_tensor<double>(mouth, 3), LossWeights{}, p);
    // Batch losses are means over the whole batch; both images share a shape
    // so each term is the average of the per-image terms.
    double expect = 0.0;
    for (int n = 0; n < 2; ++n) expect += masked_loss(xs[n], ys[n], face[n], eye[n], mouth[n], {}, p) / 2;
    CHECK(l.item() == doctest::Approx(expect).epsilon(1e-6));

    const auto back = tensor_to_image(images_to_tensor<double>(xs), 1);
    CHECK(back.same_shape(xs[1]));
    double worst = 0;
    for (std::size_t i = 0; i < back.size(); ++i)
        worst = std::max(worst, double(std::abs(back.data()[i] - xs[1].data()[i])));
    CHECK(worst < 1e-7);
}

TEST_CASE("masked_loss gradient matches finite differences") {
    std::mt19937_64 rng(35);
    std::vector<MaskBuf> face{random_mask(12, 12, rng)}, eye{random_mask(12, 12, rng)},
        mouth{random_mask(12, 12, rng)};
    const auto mf = masks_to_tensor<double>(face, 2), me = masks_to_tensor<double>(eye, 2),
               mm = masks_to_tensor<double>(mouth, 2);
    auto x = oracle::random_tensor({1, 2, 12, 12}, rng, 0.0, 1.0);
    auto y = oracle::random_tensor({1, 2, 12, 12}, rng, 0.0, 1.0);
    SsimParams p;
    p.window = 5;
    p.sigma = 1.0;
    const auto res = oracle::finite_difference_check(
        {x, y}, [&] { return masked_loss(x, y, mf, me, mm, LossWeights{}, p); }, 10, 1);
    CHECK(res.max_rel_error < 1e-4);
}
