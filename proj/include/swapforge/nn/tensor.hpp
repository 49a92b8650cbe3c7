#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swapforge::nn {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape) noexcept;
std::string shape_to_string(const Shape& shape);

/// Graph node. Only nodes that require grad record parents and a backward
/// closure; the closure reads node.grad and accumulates into parents.
template <typename T>
struct Node {
    Shape shape;
    std::vector<T> data;
    std::vector<T> grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward;
    std::string_view op = "leaf";

    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), T(0));
    }
};

/// Reference-semantics handle to a graph node (copies alias the same data).
template <typename T>
class Tensor {
public:
    using value_type = T;

    Tensor() = default;
    explicit Tensor(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, T value, bool requires_grad = false);
    static Tensor from_data(Shape shape, std::vector<T> data, bool requires_grad = false);

    bool defined() const noexcept { return static_cast<bool>(node_); }
    const Shape& shape() const noexcept { return node_->shape; }
    std::size_t rank() const noexcept { return node_->shape.size(); }
    std::size_t dim(std::size_t i) const noexcept { return node_->shape[i]; }
    std::size_t numel() const noexcept { return node_->data.size(); }

    std::span<T> data() noexcept { return node_->data; }
    std::span<const T> data() const noexcept { return node_->data; }
    std::span<T> grad() noexcept { return node_->grad; }
    std::span<const T> grad() const noexcept { return node_->grad; }
    bool has_grad() const noexcept { return node_->grad.size() == node_->data.size(); }

    bool requires_grad() const noexcept { return node_->requires_grad; }
    void set_requires_grad(bool v) noexcept { node_->requires_grad = v; }
    void zero_grad();
    T item() const;

    /// New leaf holding a copy of the data, detached from the graph.
    Tensor detach() const;

    Node<T>& node() const noexcept { return *node_; }
    const std::shared_ptr<Node<T>>& ptr() const noexcept { return node_; }

private:
    std::shared_ptr<Node<T>> node_;
};

/// Reverse-mode sweep from a single-element tensor. Leaf gradients
/// accumulate across calls until zero_grad; interior gradients are reset.
template <typename T>
void backward(const Tensor<T>& loss);

/// Creates an op output wired to `parents`. The backward closure is kept
/// only if some parent requires grad.
template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> data, std::string_view op,
                      std::vector<std::shared_ptr<Node<T>>> parents, std::function<void(Node<T>&)> backward_fn);

/// Throws TrainingDivergence when any element of t is NaN or infinite.
template <typename T>
void check_finite(const Tensor<T>& t, std::string_view op);

}  // namespace swapforge::nn
