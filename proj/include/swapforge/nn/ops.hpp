#pragma once

#include "swapforge/metrics/ssim.hpp"
#include "swapforge/nn/tensor.hpp"

namespace swapforge::nn {

// Elementwise ops require identical shapes.
template <typename T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> scale(const Tensor<T>& a, T factor);

/// Same data, new shape of equal element count.
template <typename T> Tensor<T> reshape(const Tensor<T>& a, Shape shape);

/// Sum of all elements, shape {1}.
template <typename T> Tensor<T> sum(const Tensor<T>& a);

/// Cross-correlation. x [N,Cin,H,W], w [Cout,Cin,K,K], b [Cout] or undefined.
/// Output spatial size (H + 2*padding - K) / stride + 1.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b, int stride, int padding);

/// x [N,Din], w [Dout,Din], b [Dout] or undefined -> [N,Dout].
template <typename T> Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);

template <typename T> Tensor<T> leaky_relu(const Tensor<T>& x, T alpha);
template <typename T> Tensor<T> sigmoid(const Tensor<T>& x);

/// [N,C,H,W] -> [N,C,fH,fW], each pixel replicated f x f.
template <typename T> Tensor<T> nn_upsample(const Tensor<T>& x, int factor);

/// [N,C*r*r,H,W] -> [N,C,rH,rW]; out[n,c,r*h+dy,r*w+dx] = in[n,c*r*r+dy*r+dx,h,w].
template <typename T> Tensor<T> pixel_shuffle(const Tensor<T>& x, int r);
/// Inverse permutation of pixel_shuffle.
template <typename T> Tensor<T> pixel_unshuffle(const Tensor<T>& x, int r);

/// Mean squared difference over all elements, shape {1}.
template <typename T> Tensor<T> mse_loss(const Tensor<T>& a, const Tensor<T>& b);

/// (1 - mean SSIM) / 2 over every [H,W] plane of [N,C,H,W] inputs, shape {1}.
template <typename T>
Tensor<T> dssim_loss(const Tensor<T>& a, const Tensor<T>& b, const metrics::SsimParams& p);

}  // namespace swapforge::nn
