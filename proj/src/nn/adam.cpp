#include "swapforge/nn/adam.hpp"

#include <cmath>

#include "swapforge/errors.hpp"

namespace swapforge::nn {

template <typename T>
void adam_step(const ParamList<T>& params, AdamState& state) {
    if (state.m.empty()) {
        for (const auto& p : params) {
            state.m.emplace_back(p.tensor.numel(), 0.0);
            state.v.emplace_back(p.tensor.numel(), 0.0);
        }
    }
    if (state.m.size() != params.size()) throw InvalidArgument("adam_step: parameter list changed size");
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double lr_t = state.lr * std::sqrt(1.0 - std::pow(state.beta2, t)) / (1.0 - std::pow(state.beta1, t));
    for (std::size_t k = 0; k < params.size(); ++k) {
        Tensor<T> p = params[k].tensor;
        if (state.m[k].size() != p.numel()) throw InvalidArgument("adam_step: moment shape mismatch for " + params[k].name);
        if (!p.has_grad()) continue;
        auto data = p.data();
        auto grad = p.grad();
        auto& m = state.m[k];
        auto& v = state.v[k];
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double g = grad[i];
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
            data[i] = static_cast<T>(data[i] - lr_t * m[i] / (std::sqrt(v[i]) + state.eps));
        }
    }
}

template <typename T>
void zero_grads(const ParamList<T>& params) {
    for (const auto& p : params) {
        Tensor<T> t = p.tensor;
        t.zero_grad();
    }
}

template void adam_step(const ParamList<float>&, AdamState&);
template void adam_step(const ParamList<double>&, AdamState&);
template void zero_grads(const ParamList<float>&);
template void zero_grads(const ParamList<double>&);

}  // namespace swapforge::nn
