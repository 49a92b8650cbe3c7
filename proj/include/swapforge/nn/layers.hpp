#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "swapforge/nn/ops.hpp"
#include "swapforge/nn/tensor.hpp"

namespace swapforge::nn {

template <typename T>
struct NamedParam {
    std::string name;
    Tensor<T> tensor;
};

template <typename T>
using ParamList = std::vector<NamedParam<T>>;

/// Kaiming-uniform initialiser: U(-b, b), b = sqrt(6 / ((1 + a^2) * fan_in)).
template <typename T>
Tensor<T> kaiming_uniform(Shape shape, std::size_t fan_in, double leaky_alpha, std::mt19937_64& rng);

template <typename T>
struct Conv2d {
    Tensor<T> weight;  // [Cout, Cin, K, K]
    Tensor<T> bias;    // [Cout]
    int stride = 1;
    int padding = 0;

    static Conv2d make(std::size_t in_ch, std::size_t out_ch, int kernel, int stride, int padding,
                       double leaky_alpha, std::mt19937_64& rng);
    Tensor<T> operator()(const Tensor<T>& x) const { return conv2d(x, weight, bias, stride, padding); }
    void collect(ParamList<T>& out, const std::string& prefix) const;
};

template <typename T>
struct Linear {
    Tensor<T> weight;  // [Dout, Din]
    Tensor<T> bias;    // [Dout]

    static Linear make(std::size_t in_dim, std::size_t out_dim, double leaky_alpha, std::mt19937_64& rng);
    Tensor<T> operator()(const Tensor<T>& x) const { return linear(x, weight, bias); }
    void collect(ParamList<T>& out, const std::string& prefix) const;
};

/// Factor applied to the Kaiming-initialised second conv of a residual block.
inline constexpr double kResidualInitScale = 0.1;

/// x + conv(leaky_relu(conv(x))), both convs 3x3 same-padding.
template <typename T>
struct ResidualBlock {
    Conv2d<T> conv1;
    Conv2d<T> conv2;
    T alpha = T(0.1);

    static ResidualBlock make(std::size_t channels, double leaky_alpha, std::mt19937_64& rng);
    Tensor<T> operator()(const Tensor<T>& x) const;
    void collect(ParamList<T>& out, const std::string& prefix) const;
};

/// Sub-pixel upscaler: 3x3 conv to 4*out channels, pixel_shuffle(2), LeakyReLU.
template <typename T>
struct Upscaler {
    Conv2d<T> conv;
    T alpha = T(0.1);

    static Upscaler make(std::size_t in_ch, std::size_t out_ch, double leaky_alpha, std::mt19937_64& rng);
    Tensor<T> operator()(const Tensor<T>& x) const;
    void collect(ParamList<T>& out, const std::string& prefix) const;
};

template <typename T>
std::size_t count_parameters(const ParamList<T>& params);

}  // namespace swapforge::nn
