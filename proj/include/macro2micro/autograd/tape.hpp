#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "macro2micro/core/tensor.hpp"
#include "macro2micro/errors.hpp"

namespace m2m {

// Reverse-mode tape. Nodes are appended in evaluation order, which is a
// topological order by construction, so backward() is a single reverse sweep.
// When a node does not require gradients its backward closure is never
// created, so pure inference pays only for value storage.
template <class T>
class Tape;

template <class T>
struct Var {
  Tape<T>* tape = nullptr;
  int id = -1;

  bool defined() const { return tape != nullptr && id >= 0; }
  const Tensor<T>& val() const;
  const std::vector<int>& shape() const { return val().shape; }
};

template <class T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&)>;

  Var<T> leaf(Tensor<T> value, bool requires_grad) {
    nodes_.push_back(Node{std::move(value), Tensor<T>{}, requires_grad, nullptr});
    return Var<T>{this, static_cast<int>(nodes_.size()) - 1};
  }

  // Registers a computed node. `requires_grad` should be the OR over the
  // parents' flags; `back` may be null when it is false.
  Var<T> record(Tensor<T> value, bool requires_grad, BackwardFn back) {
    nodes_.push_back(Node{std::move(value), Tensor<T>{}, requires_grad,
                          requires_grad ? std::move(back) : nullptr});
    return Var<T>{this, static_cast<int>(nodes_.size()) - 1};
  }

  const Tensor<T>& val(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  bool requires_grad(int id) const { return nodes_[static_cast<size_t>(id)].requires_grad; }

  // Gradient accumulator for a node, zero-initialized on first touch.
  Tensor<T>& grad(int id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad.shape != n.value.shape) n.grad = Tensor<T>(n.value.shape);
    return n.grad;
  }

  bool has_grad(int id) const {
    const Node& n = nodes_[static_cast<size_t>(id)];
    return n.grad.shape == n.value.shape;
  }

  // Backward from a scalar root (seeds d(root)/d(root) = 1).
  void backward(const Var<T>& root) {
    const Tensor<T>& rv = val(root.id);
    if (rv.numel() != 1)
      throw ShapeMismatch("backward root must be a scalar, got " + rv.shape_str());
    Tensor<T> seed(rv.shape);
    seed.v[0] = T(1);
    backward(root, seed);
  }

  void backward(const Var<T>& root, const Tensor<T>& seed) {
    require_same_shape(val(root.id), seed, "backward seed");
    grad(root.id) = seed;
    for (int id = root.id; id >= 0; --id) {
      Node& n = nodes_[static_cast<size_t>(id)];
      if (n.back && n.grad.shape == n.value.shape) n.back(*this);
    }
  }

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    bool requires_grad = false;
    BackwardFn back;
  };
  std::vector<Node> nodes_;
};

template <class T>
const Tensor<T>& Var<T>::val() const {
  return tape->val(id);
}

// Accumulates `delta` into the gradient of `id` if that node wants gradients.
template <class T>
void accumulate_grad(Tape<T>& tape, int id, const Tensor<T>& delta) {
  if (!tape.requires_grad(id)) return;
  Tensor<T>& g = tape.grad(id);
  for (int64_t i = 0; i < delta.numel(); ++i)
    g.v[static_cast<size_t>(i)] += delta.v[static_cast<size_t>(i)];
}

}  // namespace m2m
