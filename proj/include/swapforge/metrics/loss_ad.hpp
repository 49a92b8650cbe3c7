#pragma once

#include <vector>

#include "swapforge/imaging/image.hpp"
#include "swapforge/metrics/metrics.hpp"
#include "swapforge/nn/tensor.hpp"

namespace swapforge::metrics {

/// Stacks N images into a constant [N,C,H,W] tensor.
template <typename T>
nn::Tensor<T> images_to_tensor(const std::vector<imaging::ImageBuf>& images);

/// Stacks N masks into a constant [N,channels,H,W] tensor, each mask
/// repeated across the channels.
template <typename T>
nn::Tensor<T> masks_to_tensor(const std::vector<imaging::MaskBuf>& masks, int channels);

/// Image n of an [N,C,H,W] tensor, clamped to [0,1].
template <typename T>
imaging::ImageBuf tensor_to_image(const nn::Tensor<T>& t, std::size_t n);

/// dssim(x, y) + mse(x, y) over [N,C,H,W] tensors.
template <typename T>
nn::Tensor<T> recon_loss(const nn::Tensor<T>& x, const nn::Tensor<T>& y, const SsimParams& p = {});

/// Differentiable form of the masked regional loss. Masks are constant
/// tensors of the same shape as x and y.
template <typename T>
nn::Tensor<T> masked_loss(const nn::Tensor<T>& x, const nn::Tensor<T>& y, const nn::Tensor<T>& face,
                          const nn::Tensor<T>& eye, const nn::Tensor<T>& mouth, const LossWeights& w = {},
                          const SsimParams& p = {});

}  // namespace swapforge::metrics
