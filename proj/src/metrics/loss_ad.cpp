#include "swapforge/metrics/loss_ad.hpp"

#include <algorithm>

#include "swapforge/errors.hpp"
#include "swapforge/nn/ops.hpp"

namespace swapforge::metrics {

template <typename T>
nn::Tensor<T> images_to_tensor(const std::vector<imaging::ImageBuf>& images) {
    if (images.empty()) throw InvalidArgument("images_to_tensor: empty batch");
    const auto& f = images.front();
    const std::size_t per = f.size();
    std::vector<T> data;
    data.reserve(per * images.size());
    for (const auto& img : images) {
        if (!img.same_shape(f)) throw InvalidArgument("images_to_tensor: images differ in shape");
        data.insert(data.end(), img.data().begin(), img.data().end());
    }
    return nn::Tensor<T>::from_data({images.size(), static_cast<std::size_t>(f.channels()),
                                     static_cast<std::size_t>(f.height()), static_cast<std::size_t>(f.width())},
                                    std::move(data));
}

template <typename T>
nn::Tensor<T> masks_to_tensor(const std::vector<imaging::MaskBuf>& masks, int channels) {
    if (masks.empty()) throw InvalidArgument("masks_to_tensor: empty batch");
    if (channels < 1) throw InvalidArgument("masks_to_tensor: channels must be >= 1");
    const auto& f = masks.front();
    std::vector<T> data;
    data.reserve(f.size() * channels * masks.size());
    for (const auto& m : masks) {
        if (!m.same_size(f)) throw InvalidArgument("masks_to_tensor: masks differ in size");
        for (int c = 0; c < channels; ++c) data.insert(data.end(), m.data().begin(), m.data().end());
    }
    return nn::Tensor<T>::from_data({masks.size(), static_cast<std::size_t>(channels),
                                     static_cast<std::size_t>(f.height()), static_cast<std::size_t>(f.width())},
                                    std::move(data));
}

template <typename T>
imaging::ImageBuf tensor_to_image(const nn::Tensor<T>& t, std::size_t n) {
    if (t.rank() != 4 || n >= t.dim(0)) throw InvalidArgument("tensor_to_image: expected [N,C,H,W] and n < N");
    const std::size_t per = t.dim(1) * t.dim(2) * t.dim(3);
    std::vector<float> data(per);
    const auto src = t.data().subspan(n * per, per);
    for (std::size_t i = 0; i < per; ++i) data[i] = std::clamp(static_cast<float>(src[i]), 0.0f, 1.0f);
    return imaging::ImageBuf(static_cast<int>(t.dim(2)), static_cast<int>(t.dim(3)), static_cast<int>(t.dim(1)),
                             std::move(data));
}

template <typename T>
nn::Tensor<T> recon_loss(const nn::Tensor<T>& x, const nn::Tensor<T>& y, const SsimParams& p) {
    return nn::add(nn::dssim_loss(x, y, p), nn::mse_loss(x, y));
}

template <typename T>
nn::Tensor<T> masked_loss(const nn::Tensor<T>& x, const nn::Tensor<T>& y, const nn::Tensor<T>& face,
                          const nn::Tensor<T>& eye, const nn::Tensor<T>& mouth, const LossWeights& w,
                          const SsimParams& p) {
    w.validate();
    if (x.shape() != y.shape() || face.shape() != x.shape() || eye.shape() != x.shape() ||
        mouth.shape() != x.shape()) {
        throw InvalidArgument("masked_loss: inputs and masks must share shape " + nn::shape_to_string(x.shape()));
    }
    auto term = [&](const nn::Tensor<T>& m) { return recon_loss(nn::mul(x, m), nn::mul(y, m), p); };
    auto total = term(face);
    total = nn::add(total, nn::scale(term(eye), static_cast<T>(w.lambda_eye)));
    total = nn::add(total, nn::scale(term(mouth), static_cast<T>(w.lambda_mouth)));
    return total;
}

#define SWAPFORGE_INSTANTIATE(T)                                                                                    \
    template nn::Tensor<T> images_to_tensor<T>(const std::vector<imaging::ImageBuf>&);                            \
    template nn::Tensor<T> masks_to_tensor<T>(const std::vector<imaging::MaskBuf>&, int);                         \
    template imaging::ImageBuf tensor_to_image(const nn::Tensor<T>&, std::size_t);                                \
    template nn::Tensor<T> recon_loss(const nn::Tensor<T>&, const nn::Tensor<T>&, const SsimParams&);            \
    template nn::Tensor<T> masked_loss(const nn::Tensor<T>&, const nn::Tensor<T>&, const nn::Tensor<T>&,         \
                                       const nn::Tensor<T>&, const nn::Tensor<T>&, const LossWeights&,           \
                                       const SsimParams&);

SWAPFORGE_INSTANTIATE(float)
SWAPFORGE_INSTANTIATE(double)

}  // namespace swapforge::metrics
