#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "scratch.hpp"
#include "swapforge/errors.hpp"
#include "swapforge/nn/adam.hpp"
#include "swapforge/nn/checkpoint.hpp"
#include "swapforge/nn/layers.hpp"
#include "swapforge/nn/ops.hpp"

using namespace swapforge;
using namespace swapforge::nn;
using TD = Tensor<double>;

namespace {

TD vec(Shape s, std::vector<double> d, bool grad = false) { return TD::from_data(std::move(s), std::move(d), grad); }

void check_grad(std::vector<TD> inputs, const std::function<TD()>& f, std::uint64_t seed,
                const std::function<bool(std::size_t, std::size_t)>& skip = {}) {
    const auto r = oracle::finite_difference_check(std::move(inputs), f, 10, seed, 1e-5, skip);
    CHECK(r.probes > 0);
    CHECK(r.max_rel_error < 1e-4);
}

}  // namespace

TEST_CASE("elementwise ops") {
    auto a = vec({3}, {1, 2, 3}, true), b = vec({3}, {4, 5, 6}, true);
    CHECK(add(a, b).data()[2] == 9);
    CHECK(sub(a, b).data()[0] == -3);
    CHECK(mul(a, b).data()[1] == 10);
    CHECK(scale(a, 2.0).data()[2] == 6);
    CHECK(sum(a).item() == 6);
    CHECK(reshape(a, {3, 1}).shape() == Shape{3, 1});
    CHECK_THROWS_AS(add(a, vec({2}, {1, 2})), InvalidArgument);
    CHECK_THROWS_AS(reshape(a, {4}), InvalidArgument);

    backward(sum(mul(a, b)));
    CHECK(a.grad()[0] == 4);
    CHECK(b.grad()[2] == 3);

    std::mt19937_64 rng(41);
    auto x = oracle::random_tensor({2, 3}, rng), y = oracle::random_tensor({2, 3}, rng);
    check_grad({x, y}, [&] { return sum(mul(sub(x, y), add(x, scale(y, 0.5)))); }, 1);
    check_grad({x, y}, [&] { return mse_loss(reshape(x, {6}), reshape(y, {6})); }, 2);
}

TEST_CASE("activations") {
    auto x = vec({4}, {-2, -0.5, 0.5, 2});
    const auto l = leaky_relu(x, 0.1);
    CHECK(l.data()[0] == doctest::Approx(-0.2));
    CHECK(l.data()[3] == 2.0);
    CHECK(sigmoid(vec({1}, {0})).item() == 0.5);
    std::mt19937_64 rng(42);
    auto z = oracle::random_tensor({3, 4}, rng);
    check_grad({z}, [&] { return sum(mul(leaky_relu(z, 0.1), z)); }, 3,
               [&](std::size_t, std::size_t e) { return std::abs(z.data()[e]) < 1e-3; });
    check_grad({z}, [&] { return sum(mul(sigmoid(z), z)); }, 4);
}

TEST_CASE("conv2d examples and gradients") {
    // 3x3 all-ones kernel over a 3x3 ramp with no padding sums everything.
    auto x = vec({1, 1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    auto w = TD::full({1, 1, 3, 3}, 1.0);
    CHECK(conv2d(x, w, TD{}, 1, 0).item() == 45);
    const auto same = conv2d(x, w, vec({1}, {0.5}), 1, 1);
    CHECK(same.shape() == Shape{1, 1, 3, 3});
    CHECK(same.data()[0] == doctest::Approx(1 + 2 + 4 + 5 + 0.5));
    const auto strided = conv2d(x, w, TD{}, 2, 1);
    CHECK(strided.shape() == Shape{1, 1, 2, 2});
    CHECK(strided.data()[3] == doctest::Approx(5 + 6 + 8 + 9));
    CHECK_THROWS_AS(conv2d(x, TD::full({1, 2, 3, 3}, 1.0), TD{}, 1, 0), InvalidArgument);

    std::mt19937_64 rng(43);
    auto xi = oracle::random_tensor({2, 3, 6, 5}, rng), wi = oracle::random_tensor({4, 3, 3, 3}, rng),
         bi = oracle::random_tensor({4}, rng);
    auto target = oracle::random_tensor({2, 4, 3, 3}, rng);
    check_grad({xi, wi, bi}, [&] { return mse_loss(conv2d(xi, wi, bi, 2, 1), target); }, 5);
    auto target2 = oracle::random_tensor({2, 4, 4, 3}, rng);
    check_grad({xi, wi}, [&] { return mse_loss(conv2d(xi, wi, TD{}, 1, 0), target2); }, 6);
}

TEST_CASE("linear examples and gradients") {
    auto x = vec({1, 2}, {1, 2});
    auto w = vec({2, 2}, {1, 0, 3, 4});
    const auto y = linear(x, w, vec({2}, {0.5, -1}));
    CHECK(y.data()[0] == 1.5);
    CHECK(y.data()[1] == 10);
    std::mt19937_64 rng(44);
    auto xi = oracle::random_tensor({3, 5}, rng), wi = oracle::random_tensor({4, 5}, rng),
         bi = oracle::random_tensor({4}, rng);
    check_grad({xi, wi, bi}, [&] { return sum(mul(linear(xi, wi, bi), linear(xi, wi, bi))); }, 7);
}

TEST_CASE("upsample and pixel shuffle") {
    auto x = vec({1, 1, 2, 2}, {1, 2, 3, 4});
    const auto u = nn_upsample(x, 2);
    CHECK(u.shape() == Shape{1, 1, 4, 4});
    const std::vector<double> expect{1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4};
    for (std::size_t i = 0; i < 16; ++i) CHECK(u.data()[i] == expect[i]);

    // Channel c*r*r + dy*r + dx lands at (r*h + dy, r*w + dx).
    std::vector<double> d(4 * 2 * 3);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = double(i);
    auto p = vec({1, 4, 2, 3}, d);
    const auto s = pixel_shuffle(p, 2);
    CHECK(s.shape() == Shape{1, 1, 4, 6});
    for (int ch = 0; ch < 4; ++ch)
        for (int h = 0; h < 2; ++h)
            for (int w = 0; w < 3; ++w) {
                const int dy = ch / 2, dx = ch % 2;
                CHECK(s.data()[(2 * h + dy) * 6 + 2 * w + dx] == d[(ch * 2 + h) * 3 + w]);
            }
    const auto back = pixel_unshuffle(s, 2);
    CHECK(back.shape() == p.shape());
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(back.data()[i] == d[i]);
    CHECK_THROWS_AS(pixel_shuffle(vec({1, 3, 1, 1}, {1, 2, 3}), 2), InvalidArgument);

    std::mt19937_64 rng(45);
    auto a = oracle::random_tensor({2, 8, 3, 2}, rng);
    auto t1 = oracle::random_tensor({2, 2, 6, 4}, rng), t2 = oracle::random_tensor({2, 8, 6, 4}, rng);
    check_grad({a}, [&] { return mse_loss(pixel_shuffle(a, 2), t1); }, 8);
    check_grad({a}, [&] { return mse_loss(nn_upsample(a, 2), t2); }, 9);
    auto t3 = oracle::random_tensor({2, 32, 1, 1}, rng);
    auto q = oracle::random_tensor({2, 8, 2, 2}, rng);
    check_grad({q}, [&] { return mse_loss(pixel_unshuffle(q, 2), t3); }, 10);
}

TEST_CASE("dssim_loss values and gradient") {
    std::mt19937_64 rng(46);
    metrics::SsimParams p;
    p.window = 5;
    p.sigma = 1.0;
    auto a = oracle::random_tensor({2, 2, 9, 8}, rng, 0, 1), b = oracle::random_tensor({2, 2, 9, 8}, rng, 0, 1);
    CHECK(dssim_loss(a, a, p).item() == 0.0);
    check_grad({a, b}, [&] { return dssim_loss(a, b, p); }, 11);
}

TEST_CASE("fan-out accumulates gradients") {
    auto x = vec({2}, {3, -1}, true);
    const auto y = add(mul(x, x), scale(x, 2.0));  // x used three times
    backward(sum(y));
    CHECK(x.grad()[0] == 8);
    CHECK(x.grad()[1] == 0);
    // Leaf gradients accumulate across calls.
    backward(sum(x));
    CHECK(x.grad()[0] == 9);
    x.zero_grad();
    CHECK(x.grad()[0] == 0);
}

TEST_CASE("non-finite values raise TrainingDivergence") {
    auto x = vec({1}, {std::numeric_limits<double>::infinity()}, true);
    CHECK_THROWS_AS(mul(x, vec({1}, {0.0})), TrainingDivergence);
}

TEST_CASE("layers compose and differentiate") {
    std::mt19937_64 rng(47);
    auto res = ResidualBlock<double>::make(2, 0.1, rng);
    auto up = Upscaler<double>::make(2, 3, 0.1, rng);
    ParamList<double> params;
    res.collect(params, "res");
    up.collect(params, "up");
    CHECK(params.size() == 6);
    CHECK(count_parameters(params) == (2 * 2 * 9 + 2) * 2 + (12 * 2 * 9 + 12));
    auto x = oracle::random_tensor({1, 2, 4, 4}, rng);
    const auto y = up(res(x));
    CHECK(y.shape() == Shape{1, 3, 8, 8});
    auto target = oracle::random_tensor({1, 3, 8, 8}, rng);
    std::vector<TD> ins{x};
    for (auto& p : params) ins.push_back(p.tensor);
    // Leaky kinks are measure-zero for random inputs; central differences
    // with a tiny step stay on one side.
    check_grad(ins, [&] { return mse_loss(up(res(x)), target); }, 12);
    const auto k = kaiming_uniform<double>({1000}, 50, 0.1, rng);
    const double bound = std::sqrt(6.0 / ((1 + 0.01) * 50));
    for (double v : k.data()) CHECK(std::abs(v) <= bound);
}

TEST_CASE("adam update rules") {
    CHECK(kDefaultLearningRate == 5e-5);
    CHECK(kDefaultAdamEpsilon == 1e-7);
    auto p = vec({2}, {1.0, -2.0}, true);
    ParamList<double> params{{"p", p}};
    AdamState st;
    st.lr = 0.1;
    p.zero_grad();
    adam_step(params, st);
    CHECK(p.data()[0] == 1.0);  // zero gradient: no movement
    CHECK(p.data()[1] == -2.0);

    AdamState s2;
    s2.lr = 0.01;
    auto q = vec({1}, {0.5}, true);
    ParamList<double> qp{{"q", q}};
    q.zero_grad();
    q.grad()[0] = 4.0;
    adam_step(qp, s2);
    // Step 1: m_hat = g, v_hat = g^2, so the move is lr * |g| / (|g| + eps_hat).
    const double lr_t = 0.01 * std::sqrt(1 - 0.999) / (1 - 0.9);
    const double expect = 0.5 - lr_t * (0.1 * 4.0) / (std::sqrt(0.001 * 16.0) + 1e-7);
    CHECK(q.data()[0] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(q.data()[0] == doctest::Approx(0.49).epsilon(1e-5));

    // Minimises p^2.
    auto r = vec({1}, {3.0}, true);
    ParamList<double> rp{{"r", r}};
    AdamState s3;
    s3.lr = 0.05;
    for (int i = 0; i < 2000; ++i) {
        zero_grads(rp);
        backward(sum(mul(r, r)));
        adam_step(rp, s3);
    }
    CHECK(std::abs(r.data()[0]) < 1e-2);
    CHECK(s3.step == 2000);
}

TEST_CASE("checkpoint round-trip") {
    ScratchDir dir("ckpt");
    std::mt19937_64 rng(48);
    auto a = oracle::random_tensor({2, 3}, rng), b = oracle::random_tensor({4}, rng);
    ParamList<double> params{{"a", a}, {"b", b}};
    AdamState st;
    for (auto& p : params) {
        p.tensor.zero_grad();
        for (auto& g : p.tensor.grad()) g = 0.3;
    }
    adam_step(params, st);
    save_checkpoint(dir / "m.ckpt", make_checkpoint(params, 17, R"({"k":1})", &st));
    const auto ck = load_checkpoint(dir / "m.ckpt");
    CHECK(ck.step == 17);
    CHECK(ck.metadata == R"({"k":1})");
    CHECK(ck.has_moments);

    auto a2 = TD::zeros({2, 3}), b2 = TD::zeros({4});
    ParamList<double> fresh{{"a", a2}, {"b", b2}};
    AdamState st2;
    restore_parameters(ck, fresh, &st2);
    for (std::size_t i = 0; i < 6; ++i) CHECK(a2.data()[i] == doctest::Approx(a.data()[i]).epsilon(1e-6));
    CHECK(st2.step == st.step);
    REQUIRE(st2.m.size() == 2);
    CHECK(st2.m[1][0] == doctest::Approx(st.m[1][0]).epsilon(1e-6));

    ParamList<double> wrong{{"a", TD::zeros({3, 2})}};
    CHECK_THROWS(restore_parameters(ck, wrong));
    CHECK_THROWS(load_checkpoint(dir / "missing.ckpt"));
}

TEST_CASE("hand examples") {
    auto x = vec({1, 1, 2, 2}, {1, 2, 3, 4});
    const auto id = conv2d(x, TD::full({1, 1, 1, 1}, 1.0), vec({1}, {0}), 1, 0);
    for (std::size_t i = 0; i < 4; ++i) CHECK(id.data()[i] == x.data()[i]);
    const auto ones = conv2d(TD::full({1, 1, 5, 5}, 1.0), TD::full({1, 1, 3, 3}, 1.0), TD{}, 1, 1);
    CHECK(ones.data()[2 * 5 + 2] == 9.0);
    CHECK(ones.data()[0] == 4.0);

    auto eye = vec({2, 2}, {1, 0, 0, 1});
    auto v = vec({1, 2}, {0.3, -0.7});
    const auto lv = linear(v, eye, TD{});
    CHECK(lv.data()[0] == 0.3);
    CHECK(lv.data()[1] == -0.7);
    std::mt19937_64 rng(49);
    auto w = oracle::random_tensor({3, 2}, rng);
    const auto f1 = linear(scale(v, 2.5), w, TD{}), f2 = linear(v, w, TD{});
    for (std::size_t i = 0; i < 3; ++i) CHECK(f1.data()[i] == doctest::Approx(2.5 * f2.data()[i]));

    CHECK(leaky_relu(vec({1}, {0}), 0.1).item() == 0.0);
    CHECK(leaky_relu(vec({1}, {-1}), 0.1).item() == doctest::Approx(-0.1));

    const auto same = nn_upsample(x, 1);
    for (std::size_t i = 0; i < 4; ++i) CHECK(same.data()[i] == x.data()[i]);
    auto one = vec({1, 1, 1, 1}, {0.7}, true);
    const auto up = nn_upsample(one, 2);
    for (double u : up.data()) CHECK(u == 0.7);
    backward(sum(up));
    CHECK(one.grad()[0] == 4.0);

    const auto r1 = pixel_shuffle(x, 1);
    for (std::size_t i = 0; i < 4; ++i) CHECK(r1.data()[i] == x.data()[i]);
    const auto abcd = pixel_shuffle(vec({1, 4, 1, 1}, {10, 20, 30, 40}), 2);
    CHECK(abcd.data()[0] == 10);
    CHECK(abcd.data()[1] == 20);
    CHECK(abcd.data()[2] == 30);
    CHECK(abcd.data()[3] == 40);

    // Gradient sums are conserved through the reindexing ops.
    auto g = oracle::random_tensor({1, 8, 3, 3}, rng);
    g.set_requires_grad(true);
    auto wts = oracle::random_tensor({1, 2, 6, 6}, rng);
    backward(sum(mul(pixel_shuffle(g, 2), wts)));
    double gin = 0, gout = 0;
    for (double t : g.grad()) gin += t;
    for (double t : wts.data()) gout += t;
    CHECK(gin == doctest::Approx(gout));

    auto yx = vec({2}, {1.5, -2}, true);
    backward(sum(mul(yx, yx)));
    CHECK(yx.grad()[0] == 3.0);
    CHECK(yx.grad()[1] == -4.0);
}

TEST_CASE("conv gradient check on a 1x2x6x6 input with 3 filters") {
    std::mt19937_64 rng(50);
    auto x = oracle::random_tensor({1, 2, 6, 6}, rng), w = oracle::random_tensor({3, 2, 3, 3}, rng),
         b = oracle::random_tensor({3}, rng), t = oracle::random_tensor({1, 3, 6, 6}, rng);
    check_grad({x, w, b}, [&] { return mse_loss(conv2d(x, w, b, 1, 1), t); }, 13);
}

TEST_CASE("residual block identity and gradient flow") {
    std::mt19937_64 rng(51);
    auto blk = ResidualBlock<double>::make(3, 0.1, rng);
    auto x = oracle::random_tensor({2, 3, 5, 4}, rng);
    CHECK(blk(x).shape() == x.shape());
    ParamList<double> params;
    blk.collect(params, "r");
    zero_grads(params);
    backward(sum(mul(blk(x), blk(x))));
    for (const auto& p : params) {
        double s = 0;
        for (double gv : p.tensor.grad()) s += std::abs(gv);
        CHECK(s > 0);
    }
    for (auto& p : params)
        for (auto& v : p.tensor.data()) v = 0;
    const auto y = blk(x);
    for (std::size_t i = 0; i < x.numel(); ++i) CHECK(y.data()[i] == x.data()[i]);
}

TEST_CASE("adam hand-evaluated step and convergence") {
    auto p = vec({1}, {0.0}, true);
    ParamList<double> pl{{"p", p}};
    AdamState st;
    st.lr = 1e-3;
    zero_grads(pl);
    p.grad()[0] = 1.0;
    adam_step(pl, st);
    // m = 0.1, v = 0.001; lr_t = lr*sqrt(0.001)/0.1.
    const double lr_t = 1e-3 * std::sqrt(1e-3) / 0.1;
    CHECK(p.data()[0] == doctest::Approx(-lr_t * 0.1 / (std::sqrt(1e-3) + 1e-7)).epsilon(1e-12));
    CHECK(p.data()[0] == doctest::Approx(-1e-3).epsilon(1e-3));

    auto q = vec({1}, {1.0}, true);
    ParamList<double> ql{{"q", q}};
    AdamState s2;
    s2.lr = 0.1;
    for (int i = 0; i < 200; ++i) {
        zero_grads(ql);
        backward(sum(mul(q, q)));
        adam_step(ql, s2);
    }
    CHECK(std::abs(q.data()[0]) < 1e-2);
}
