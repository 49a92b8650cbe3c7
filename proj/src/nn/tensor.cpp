#include "swapforge/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "swapforge/errors.hpp"

namespace swapforge::nn {

std::size_t numel(const Shape& shape) noexcept {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

std::string shape_to_string(const Shape& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
    return s + "]";
}

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
    return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T value, bool requires_grad) {
    auto n = std::make_shared<Node<T>>();
    n->data.assign(nn::numel(shape), value);
    n->shape = std::move(shape);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
}

template <typename T>
Tensor<T> Tensor<T>::from_data(Shape shape, std::vector<T> data, bool requires_grad) {
    if (data.size() != nn::numel(shape)) {
        throw InvalidArgument("Tensor: " + std::to_string(data.size()) + " values for shape " + shape_to_string(shape));
    }
    auto n = std::make_shared<Node<T>>();
    n->shape = std::move(shape);
    n->data = std::move(data);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
}

template <typename T>
void Tensor<T>::zero_grad() {
    node_->grad.assign(node_->data.size(), T(0));
}

template <typename T>
T Tensor<T>::item() const {
    if (numel() != 1) throw InvalidArgument("Tensor::item: tensor has " + std::to_string(numel()) + " elements");
    return node_->data[0];
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
    return from_data(shape(), node_->data, false);
}

template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> data, std::string_view op,
                      std::vector<std::shared_ptr<Node<T>>> parents, std::function<void(Node<T>&)> backward_fn) {
    auto n = std::make_shared<Node<T>>();
    n->shape = std::move(shape);
    n->data = std::move(data);
    n->op = op;
    const bool any = std::any_of(parents.begin(), parents.end(), [](const auto& p) { return p && p->requires_grad; });
    if (any) {
        n->requires_grad = true;
        n->parents = std::move(parents);
        n->backward = std::move(backward_fn);
    }
    Tensor<T> out(std::move(n));
    check_finite(out, op);
    return out;
}

template <typename T>
void check_finite(const Tensor<T>& t, std::string_view op) {
    for (T v : t.data()) {
        if (!std::isfinite(v)) throw TrainingDivergence("non-finite value produced by " + std::string(op), -1);
    }
}

template <typename T>
void backward(const Tensor<T>& loss) {
    if (loss.numel() != 1) throw InvalidArgument("backward: loss must have exactly one element");
    if (!loss.requires_grad()) return;

    // Iterative post-order DFS gives a topological order (parents first).
    std::vector<Node<T>*> order;
    std::unordered_set<Node<T>*> seen;
    std::vector<std::pair<Node<T>*, std::size_t>> stack{{&loss.node(), 0}};
    seen.insert(&loss.node());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node<T>* p = node->parents[next++].get();
            if (p && p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
    for (Node<T>* n : order) {
        if (n->backward) {
            n->grad.assign(n->data.size(), T(0));
        } else {
            n->ensure_grad();
        }
    }
    loss.node().grad[0] += T(1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if ((*it)->backward) (*it)->backward(**it);
    }
}

template class Tensor<float>;
template class Tensor<double>;
template void backward(const Tensor<float>&);
template void backward(const Tensor<double>&);
template void check_finite(const Tensor<float>&, std::string_view);
template void check_finite(const Tensor<double>&, std::string_view);
template Tensor<float> make_result(Shape, std::vector<float>, std::string_view,
                                   std::vector<std::shared_ptr<Node<float>>>, std::function<void(Node<float>&)>);
template Tensor<double> make_result(Shape, std::vector<double>, std::string_view,
                                    std::vector<std::shared_ptr<Node<double>>>, std::function<void(Node<double>&)>);

}  // namespace swapforge::nn
