#include "swapforge/nn/ops.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "swapforge/errors.hpp"

namespace swapforge::nn {

namespace {

template <typename T>
using MatrixRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapRM = Eigen::Map<MatrixRM<T>>;
template <typename T>
using CMapRM = Eigen::Map<const MatrixRM<T>>;

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw InvalidArgument(std::string(op) + ": shape mismatch " + shape_to_string(a.shape()) + " vs " +
                              shape_to_string(b.shape()));
    }
}

template <typename T>
void require_rank(const Tensor<T>& a, std::size_t rank, const char* op) {
    if (a.rank() != rank) {
        throw InvalidArgument(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                              shape_to_string(a.shape()));
    }
}

template <typename T>
bool needs(const std::shared_ptr<Node<T>>& p) {
    return p && p->requires_grad;
}

}  // namespace

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape(a, b, "add");
    std::vector<T> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
    return make_result<T>(a.shape(), std::move(out), "add", {a.ptr(), b.ptr()}, [](Node<T>& n) {
        for (auto& p : n.parents) {
            if (!needs(p)) continue;
            for (std::size_t i = 0; i < n.grad.size(); ++i) p->grad[i] += n.grad[i];
        }
    });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape(a, b, "sub");
    std::vector<T> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
    return make_result<T>(a.shape(), std::move(out), "sub", {a.ptr(), b.ptr()}, [](Node<T>& n) {
        if (needs(n.parents[0]))
            for (std::size_t i = 0; i < n.grad.size(); ++i) n.parents[0]->grad[i] += n.grad[i];
        if (needs(n.parents[1]))
            for (std::size_t i = 0; i < n.grad.size(); ++i) n.parents[1]->grad[i] -= n.grad[i];
    });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape(a, b, "mul");
    std::vector<T> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
    return make_result<T>(a.shape(), std::move(out), "mul", {a.ptr(), b.ptr()}, [](Node<T>& n) {
        auto& pa = n.parents[0];
        auto& pb = n.parents[1];
        // Read both operands before writing: pa and pb may be the same node.
        for (std::size_t i = 0; i < n.grad.size(); ++i) {
            const T av = pa->data[i], bv = pb->data[i];
            if (needs(pa)) pa->grad[i] += n.grad[i] * bv;
            if (needs(pb)) pb->grad[i] += n.grad[i] * av;
        }
    });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
    std::vector<T> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * factor;
    return make_result<T>(a.shape(), std::move(out), "scale", {a.ptr()}, [factor](Node<T>& n) {
        for (std::size_t i = 0; i < n.grad.size(); ++i) n.parents[0]->grad[i] += n.grad[i] * factor;
    });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
    if (numel(shape) != a.numel()) {
        throw InvalidArgument("reshape: cannot view " + shape_to_string(a.shape()) + " as " + shape_to_string(shape));
    }
    std::vector<T> out(a.data().begin(), a.data().end());
    return make_result<T>(std::move(shape), std::move(out), "reshape", {a.ptr()}, [](Node<T>& n) {
        for (std::size_t i = 0; i < n.grad.size(); ++i) n.parents[0]->grad[i] += n.grad[i];
    });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
    T s = 0;
    for (T v : a.data()) s += v;
    return make_result<T>({1}, {s}, "sum", {a.ptr()}, [](Node<T>& n) {
        for (auto& g : n.parents[0]->grad) g += n.grad[0];
    });
}

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b, int stride, int padding) {
    require_rank(x, 4, "conv2d");
    require_rank(w, 4, "conv2d");
    const std::size_t N = x.dim(0), Cin = x.dim(1), H = x.dim(2), W = x.dim(3);
    const std::size_t Cout = w.dim(0), K = w.dim(2);
    if (w.dim(1) != Cin || w.dim(3) != K) {
        throw InvalidArgument("conv2d: weight " + shape_to_string(w.shape()) + " incompatible with input " +
                              shape_to_string(x.shape()));
    }
    if (K % 2 == 0) throw InvalidArgument("conv2d: kernel size must be odd");
    if (stride < 1 || padding < 0) throw InvalidArgument("conv2d: bad stride/padding");
    if (b.defined() && (b.rank() != 1 || b.dim(0) != Cout)) throw InvalidArgument("conv2d: bias shape mismatch");
    if (H + 2 * padding < K || W + 2 * padding < K) throw InvalidArgument("conv2d: kernel larger than padded input");
    const std::size_t Ho = (H + 2 * padding - K) / stride + 1;
    const std::size_t Wo = (W + 2 * padding - K) / stride + 1;
    const std::size_t rows = Cin * K * K;
    const std::size_t spatial = Ho * Wo;
    const std::size_t cols = N * spatial;

    // im2col over the whole batch: col[(ci,ky,kx), (n,oy,ox)].
    auto col = std::make_shared<std::vector<T>>(rows * cols, T(0));
    const T* xd = x.data().data();
    for (std::size_t ci = 0; ci < Cin; ++ci)
        for (std::size_t ky = 0; ky < K; ++ky)
            for (std::size_t kx = 0; kx < K; ++kx) {
                T* crow = col->data() + ((ci * K + ky) * K + kx) * cols;
                for (std::size_t n = 0; n < N; ++n) {
                    const T* plane = xd + (n * Cin + ci) * H * W;
                    T* dst = crow + n * spatial;
                    for (std::size_t oy = 0; oy < Ho; ++oy) {
                        const long iy = static_cast<long>(oy * stride + ky) - padding;
                        if (iy < 0 || iy >= static_cast<long>(H)) continue;
                        for (std::size_t ox = 0; ox < Wo; ++ox) {
                            const long ix = static_cast<long>(ox * stride + kx) - padding;
                            if (ix < 0 || ix >= static_cast<long>(W)) continue;
                            dst[oy * Wo + ox] = plane[iy * W + ix];
                        }
                    }
                }
            }

    MatrixRM<T> prod = CMapRM<T>(w.data().data(), Cout, rows) * CMapRM<T>(col->data(), rows, cols);
    std::vector<T> out(N * Cout * spatial);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t co = 0; co < Cout; ++co) {
            const T bias = b.defined() ? b.data()[co] : T(0);
            const T* src = prod.data() + co * cols + n * spatial;
            T* dst = out.data() + (n * Cout + co) * spatial;
            for (std::size_t i = 0; i < spatial; ++i) dst[i] = src[i] + bias;
        }

    std::vector<std::shared_ptr<Node<T>>> parents{x.ptr(), w.ptr()};
    if (b.defined()) parents.push_back(b.ptr());
    return make_result<T>(
        {N, Cout, Ho, Wo}, std::move(out), "conv2d", std::move(parents),
        [=](Node<T>& node) {
            auto& px = node.parents[0];
            auto& pw = node.parents[1];
            MatrixRM<T> gout(Cout, cols);
            for (std::size_t n = 0; n < N; ++n)
                for (std::size_t co = 0; co < Cout; ++co) {
                    const T* src = node.grad.data() + (n * Cout + co) * spatial;
                    std::copy(src, src + spatial, gout.data() + co * cols + n * spatial);
                }
            if (node.parents.size() > 2 && needs(node.parents[2])) {
                auto& gb = node.parents[2]->grad;
                for (std::size_t co = 0; co < Cout; ++co) gb[co] += gout.row(co).sum();
            }
            if (needs(pw)) {
                MapRM<T>(pw->grad.data(), Cout, rows).noalias() += gout * CMapRM<T>(col->data(), rows, cols).transpose();
            }
            if (needs(px)) {
                MatrixRM<T> gcol = CMapRM<T>(pw->data.data(), Cout, rows).transpose() * gout;
                T* gx = px->grad.data();
                for (std::size_t ci = 0; ci < Cin; ++ci)
                    for (std::size_t ky = 0; ky < K; ++ky)
                        for (std::size_t kx = 0; kx < K; ++kx) {
                            const T* crow = gcol.data() + ((ci * K + ky) * K + kx) * cols;
                            for (std::size_t n = 0; n < N; ++n) {
                                T* plane = gx + (n * Cin + ci) * H * W;
                                const T* src = crow + n * spatial;
                                for (std::size_t oy = 0; oy < Ho; ++oy) {
                                    const long iy = static_cast<long>(oy * stride + ky) - padding;
                                    if (iy < 0 || iy >= static_cast<long>(H)) continue;
                                    for (std::size_t ox = 0; ox < Wo; ++ox) {
                                        const long ix = static_cast<long>(ox * stride + kx) - padding;
                                        if (ix < 0 || ix >= static_cast<long>(W)) continue;
                                        plane[iy * W + ix] += src[oy * Wo + ox];
                                    }
                                }
                            }
                        }
            }
        });
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
    require_rank(x, 2, "linear");
    require_rank(w, 2, "linear");
    const std::size_t N = x.dim(0), Din = x.dim(1), Dout = w.dim(0);
    if (w.dim(1) != Din) {
        throw InvalidArgument("linear: weight " + shape_to_string(w.shape()) + " incompatible with input " +
                              shape_to_string(x.shape()));
    }
    if (b.defined() && (b.rank() != 1 || b.dim(0) != Dout)) throw InvalidArgument("linear: bias shape mismatch");
    MatrixRM<T> y = CMapRM<T>(x.data().data(), N, Din) * CMapRM<T>(w.data().data(), Dout, Din).transpose();
    if (b.defined()) {
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t o = 0; o < Dout; ++o) y(n, o) += b.data()[o];
    }
    std::vector<T> out(y.data(), y.data() + N * Dout);
    std::vector<std::shared_ptr<Node<T>>> parents{x.ptr(), w.ptr()};
    if (b.defined()) parents.push_back(b.ptr());
    return make_result<T>({N, Dout}, std::move(out), "linear", std::move(parents), [=](Node<T>& node) {
        auto& px = node.parents[0];
        auto& pw = node.parents[1];
        CMapRM<T> gy(node.grad.data(), N, Dout);
        if (needs(px)) MapRM<T>(px->grad.data(), N, Din).noalias() += gy * CMapRM<T>(pw->data.data(), Dout, Din);
        if (needs(pw)) MapRM<T>(pw->grad.data(), Dout, Din).noalias() += gy.transpose() * CMapRM<T>(px->data.data(), N, Din);
        if (node.parents.size() > 2 && needs(node.parents[2])) {
            auto& gb = node.parents[2]->grad;
            for (std::size_t n = 0; n < N; ++n)
                for (std::size_t o = 0; o < Dout; ++o) gb[o] += gy(n, o);
        }
    });
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T alpha) {
    std::vector<T> out(x.numel());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const T v = x.data()[i];
        out[i] = v > T(0) ? v : alpha * v;
    }
    return make_result<T>(x.shape(), std::move(out), "leaky_relu", {x.ptr()}, [alpha](Node<T>& n) {
        auto& p = n.parents[0];
        for (std::size_t i = 0; i < n.grad.size(); ++i) p->grad[i] += n.grad[i] * (p->data[i] > T(0) ? T(1) : alpha);
    });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
    std::vector<T> out(x.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = T(1) / (T(1) + std::exp(-x.data()[i]));
    return make_result<T>(x.shape(), std::move(out), "sigmoid", {x.ptr()}, [](Node<T>& n) {
        auto& p = n.parents[0];
        for (std::size_t i = 0; i < n.grad.size(); ++i) {
            const T s = n.data[i];
            p->grad[i] += n.grad[i] * s * (T(1) - s);
        }
    });
}

template <typename T>
Tensor<T> nn_upsample(const Tensor<T>& x, int factor) {
    require_rank(x, 4, "nn_upsample");
    if (factor < 1) throw InvalidArgument("nn_upsample: factor must be >= 1");
    const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3), f = factor;
    const std::size_t Ho = H * f, Wo = W * f;
    std::vector<T> out(N * C * Ho * Wo);
    for (std::size_t p = 0; p < N * C; ++p)
        for (std::size_t y = 0; y < Ho; ++y)
            for (std::size_t xx = 0; xx < Wo; ++xx) out[(p * Ho + y) * Wo + xx] = x.data()[(p * H + y / f) * W + xx / f];
    return make_result<T>({N, C, Ho, Wo}, std::move(out), "nn_upsample", {x.ptr()}, [=](Node<T>& n) {
        auto& g = n.parents[0]->grad;
        for (std::size_t p = 0; p < N * C; ++p)
            for (std::size_t y = 0; y < Ho; ++y)
                for (std::size_t xx = 0; xx < Wo; ++xx) g[(p * H + y / f) * W + xx / f] += n.grad[(p * Ho + y) * Wo + xx];
    });
}

namespace {

// Flat index maps for pixel_shuffle: out index -> in index.
std::vector<std::size_t> shuffle_map(std::size_t N, std::size_t C, std::size_t H, std::size_t W, std::size_t r) {
    const std::size_t Ho = H * r, Wo = W * r;
    std::vector<std::size_t> map(N * C * Ho * Wo);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t h = 0; h < H; ++h)
                for (std::size_t dy = 0; dy < r; ++dy)
                    for (std::size_t w = 0; w < W; ++w)
                        for (std::size_t dx = 0; dx < r; ++dx) {
                            const std::size_t oi = ((n * C + c) * Ho + (r * h + dy)) * Wo + (r * w + dx);
                            const std::size_t ii = ((n * C * r * r + c * r * r + dy * r + dx) * H + h) * W + w;
                            map[oi] = ii;
                        }
    return map;
}

template <typename T>
Tensor<T> permute(const Tensor<T>& x, Shape out_shape, std::vector<std::size_t> src_of, std::string_view op) {
    std::vector<T> out(src_of.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.data()[src_of[i]];
    auto map = std::make_shared<std::vector<std::size_t>>(std::move(src_of));
    return make_result<T>(std::move(out_shape), std::move(out), op, {x.ptr()}, [map](Node<T>& n) {
        auto& g = n.parents[0]->grad;
        for (std::size_t i = 0; i < map->size(); ++i) g[(*map)[i]] += n.grad[i];
    });
}

}  // namespace

template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, int r) {
    require_rank(x, 4, "pixel_shuffle");
    if (r < 1) throw InvalidArgument("pixel_shuffle: r must be >= 1");
    const std::size_t rr = static_cast<std::size_t>(r) * r;
    if (x.dim(1) % rr != 0) {
        throw InvalidArgument("pixel_shuffle: " + std::to_string(x.dim(1)) + " channels not divisible by r^2 = " +
                              std::to_string(rr));
    }
    const std::size_t N = x.dim(0), C = x.dim(1) / rr, H = x.dim(2), W = x.dim(3);
    return permute(x, {N, C, H * r, W * r}, shuffle_map(N, C, H, W, r), "pixel_shuffle");
}

template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& x, int r) {
    require_rank(x, 4, "pixel_unshuffle");
    if (r < 1 || x.dim(2) % r != 0 || x.dim(3) % r != 0) throw InvalidArgument("pixel_unshuffle: size not divisible by r");
    const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2) / r, W = x.dim(3) / r;
    const auto fwd = shuffle_map(N, C, H, W, r);
    std::vector<std::size_t> inv(fwd.size());
    for (std::size_t i = 0; i < fwd.size(); ++i) inv[fwd[i]] = i;
    return permute(x, {N, C * r * r, H, W}, std::move(inv), "pixel_unshuffle");
}

template <typename T>
Tensor<T> mse_loss(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape(a, b, "mse_loss");
    double s = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        const double d = static_cast<double>(a.data()[i]) - b.data()[i];
        s += d * d;
    }
    const double inv = 1.0 / static_cast<double>(a.numel());
    return make_result<T>({1}, {static_cast<T>(s * inv)}, "mse_loss", {a.ptr(), b.ptr()}, [inv](Node<T>& n) {
        auto& pa = n.parents[0];
        auto& pb = n.parents[1];
        const T g = n.grad[0] * static_cast<T>(2.0 * inv);
        for (std::size_t i = 0; i < pa->data.size(); ++i) {
            const T d = pa->data[i] - pb->data[i];
            if (needs(pa)) pa->grad[i] += g * d;
            if (needs(pb)) pb->grad[i] -= g * d;
        }
    });
}

template <typename T>
Tensor<T> dssim_loss(const Tensor<T>& a, const Tensor<T>& b, const metrics::SsimParams& p) {
    require_same_shape(a, b, "dssim_loss");
    require_rank(a, 4, "dssim_loss");
    p.validate();
    const std::size_t planes = a.dim(0) * a.dim(1);
    const int H = static_cast<int>(a.dim(2)), W = static_cast<int>(a.dim(3));
    if (H < p.window || W < p.window) throw InvalidArgument("dssim_loss: window larger than image");
    const std::size_t ps = static_cast<std::size_t>(H) * W;
    std::vector<double> xa(ps), xb(ps);
    double total = 0.0;
    for (std::size_t k = 0; k < planes; ++k) {
        for (std::size_t i = 0; i < ps; ++i) {
            xa[i] = a.data()[k * ps + i];
            xb[i] = b.data()[k * ps + i];
        }
        total += metrics::detail::ssim_plane(xa, xb, H, W, p);
    }
    const double mean_ssim = total / static_cast<double>(planes);
    return make_result<T>(
        {1}, {static_cast<T>((1.0 - mean_ssim) / 2.0)}, "dssim_loss", {a.ptr(), b.ptr()}, [=](Node<T>& n) {
            auto& pa = n.parents[0];
            auto& pb = n.parents[1];
            // d dssim / d ssim_plane = -1 / (2 * planes)
            const double s = -static_cast<double>(n.grad[0]) / (2.0 * static_cast<double>(planes));
            std::vector<double> ga(ps), gb(ps), va(ps), vb(ps);
            for (std::size_t k = 0; k < planes; ++k) {
                for (std::size_t i = 0; i < ps; ++i) {
                    va[i] = pa->data[k * ps + i];
                    vb[i] = pb->data[k * ps + i];
                }
                std::fill(ga.begin(), ga.end(), 0.0);
                std::fill(gb.begin(), gb.end(), 0.0);
                metrics::detail::ssim_plane(va, vb, H, W, p, needs(pa) ? std::span<double>(ga) : std::span<double>{},
                                            needs(pb) ? std::span<double>(gb) : std::span<double>{}, s);
                for (std::size_t i = 0; i < ps; ++i) {
                    if (needs(pa)) pa->grad[k * ps + i] += static_cast<T>(ga[i]);
                    if (needs(pb)) pb->grad[k * ps + i] += static_cast<T>(gb[i]);
                }
            }
        });
}

#define SWAPFORGE_INSTANTIATE_OPS(T)                                                                   \
    template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                        \
    template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                        \
    template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                        \
    template Tensor<T> scale(const Tensor<T>&, T);                                                     \
    template Tensor<T> reshape(const Tensor<T>&, Shape);                                               \
    template Tensor<T> sum(const Tensor<T>&);                                                          \
    template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, int, int);         \
    template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);                   \
    template Tensor<T> leaky_relu(const Tensor<T>&, T);                                                \
    template Tensor<T> sigmoid(const Tensor<T>&);                                                      \
    template Tensor<T> nn_upsample(const Tensor<T>&, int);                                             \
    template Tensor<T> pixel_shuffle(const Tensor<T>&, int);                                           \
    template Tensor<T> pixel_unshuffle(const Tensor<T>&, int);                                         \
    template Tensor<T> mse_loss(const Tensor<T>&, const Tensor<T>&);                                   \
    template Tensor<T> dssim_loss(const Tensor<T>&, const Tensor<T>&, const metrics::SsimParams&);

SWAPFORGE_INSTANTIATE_OPS(float)
SWAPFORGE_INSTANTIATE_OPS(double)

#undef SWAPFORGE_INSTANTIATE_OPS

}  // namespace swapforge::nn
