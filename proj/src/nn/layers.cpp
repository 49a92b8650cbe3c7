#include "swapforge/nn/layers.hpp"

#include <cmath>

namespace swapforge::nn {

template <typename T>
Tensor<T> kaiming_uniform(Shape shape, std::size_t fan_in, double leaky_alpha, std::mt19937_64& rng) {
    const double bound = std::sqrt(6.0 / ((1.0 + leaky_alpha * leaky_alpha) * static_cast<double>(fan_in)));
    std::vector<T> data(numel(shape));
    for (auto& v : data) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        v = static_cast<T>((2.0 * u - 1.0) * bound);
    }
    return Tensor<T>::from_data(std::move(shape), std::move(data), true);
}

template <typename T>
Conv2d<T> Conv2d<T>::make(std::size_t in_ch, std::size_t out_ch, int kernel, int stride, int padding,
                          double leaky_alpha, std::mt19937_64& rng) {
    Conv2d c;
    const std::size_t k = static_cast<std::size_t>(kernel);
    c.weight = kaiming_uniform<T>({out_ch, in_ch, k, k}, in_ch * k * k, leaky_alpha, rng);
    c.bias = Tensor<T>::zeros({out_ch}, true);
    c.stride = stride;
    c.padding = padding;
    return c;
}

template <typename T>
void Conv2d<T>::collect(ParamList<T>& out, const std::string& prefix) const {
    out.push_back({prefix + ".weight", weight});
    out.push_back({prefix + ".bias", bias});
}

template <typename T>
Linear<T> Linear<T>::make(std::size_t in_dim, std::size_t out_dim, double leaky_alpha, std::mt19937_64& rng) {
    Linear l;
    l.weight = kaiming_uniform<T>({out_dim, in_dim}, in_dim, leaky_alpha, rng);
    l.bias = Tensor<T>::zeros({out_dim}, true);
    return l;
}

template <typename T>
void Linear<T>::collect(ParamList<T>& out, const std::string& prefix) const {
    out.push_back({prefix + ".weight", weight});
    out.push_back({prefix + ".bias", bias});
}

template <typename T>
ResidualBlock<T> ResidualBlock<T>::make(std::size_t channels, double leaky_alpha, std::mt19937_64& rng) {
    ResidualBlock r;
    r.conv1 = Conv2d<T>::make(channels, channels, 3, 1, 1, leaky_alpha, rng);
    r.conv2 = Conv2d<T>::make(channels, channels, 3, 1, 1, leaky_alpha, rng);
    // A plain Kaiming branch doubles the activation variance per block;
    // starting the branch small keeps stacked blocks near the identity.
    for (auto& w : r.conv2.weight.data()) w *= static_cast<T>(kResidualInitScale);
    r.alpha = static_cast<T>(leaky_alpha);
    return r;
}

template <typename T>
Tensor<T> ResidualBlock<T>::operator()(const Tensor<T>& x) const {
    return add(x, conv2(leaky_relu(conv1(x), alpha)));
}

template <typename T>
void ResidualBlock<T>::collect(ParamList<T>& out, const std::string& prefix) const {
    conv1.collect(out, prefix + ".conv1");
    conv2.collect(out, prefix + ".conv2");
}

template <typename T>
Upscaler<T> Upscaler<T>::make(std::size_t in_ch, std::size_t out_ch, double leaky_alpha, std::mt19937_64& rng) {
    Upscaler u;
    u.conv = Conv2d<T>::make(in_ch, out_ch * 4, 3, 1, 1, leaky_alpha, rng);
    u.alpha = static_cast<T>(leaky_alpha);
    return u;
}

template <typename T>
Tensor<T> Upscaler<T>::operator()(const Tensor<T>& x) const {
    return leaky_relu(pixel_shuffle(conv(x), 2), alpha);
}

template <typename T>
void Upscaler<T>::collect(ParamList<T>& out, const std::string& prefix) const {
    conv.collect(out, prefix + ".conv");
}

template <typename T>
std::size_t count_parameters(const ParamList<T>& params) {
    std::size_t n = 0;
    for (const auto& p : params) n += p.tensor.numel();
    return n;
}

#define SWAPFORGE_INSTANTIATE_LAYERS(T)                                                       \
    template Tensor<T> kaiming_uniform(Shape, std::size_t, double, std::mt19937_64&);         \
    template struct Conv2d<T>;                                                                \
    template struct Linear<T>;                                                                \
    template struct ResidualBlock<T>;                                                         \
    template struct Upscaler<T>;                                                              \
    template std::size_t count_parameters(const ParamList<T>&);

SWAPFORGE_INSTANTIATE_LAYERS(float)
SWAPFORGE_INSTANTIATE_LAYERS(double)

#undef SWAPFORGE_INSTANTIATE_LAYERS

}  // namespace swapforge::nn
