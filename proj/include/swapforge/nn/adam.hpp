#pragma once

#include <cstddef>
#include <vector>

#include "swapforge/nn/layers.hpp"

namespace swapforge::nn {

inline constexpr double kDefaultLearningRate = 5e-5;
inline constexpr double kDefaultAdamEpsilon = 1e-7;

struct AdamState {
    double lr = kDefaultLearningRate;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = kDefaultAdamEpsilon;
    long step = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
};

/// One bias-corrected Adam update in the epsilon-hat form
///   lr_t = lr * sqrt(1 - beta2^t) / (1 - beta1^t)
///   p   -= lr_t * m / (sqrt(v) + eps)
/// Parameters without a gradient buffer are skipped. Moment buffers are
/// created on the first call and must keep matching shapes afterwards.
template <typename T>
void adam_step(const ParamList<T>& params, AdamState& state);

template <typename T>
void zero_grads(const ParamList<T>& params);

}  // namespace swapforge::nn
