#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "macro2micro/autograd/kernels.hpp"
#include "macro2micro/autograd/tape.hpp"

// Differentiable operators. Each wrapper evaluates the kernel, then records a
// closure that routes upstream gradients to the parents that want them.

namespace m2m::ag {

template <class T>
void check_same_tape(const Var<T>& a, const Var<T>& b) {
  if (a.tape != b.tape) throw ShapeMismatch("vars belong to different tapes");
}

template <class T>
Var<T> add(Var<T> a, Var<T> b) {
  check_same_tape(a, b);
  require_same_shape(a.val(), b.val(), "add");
  Tensor<T> y = a.val();
  for (int64_t i = 0; i < y.numel(); ++i)
    y.v[static_cast<size_t>(i)] += b.val().v[static_cast<size_t>(i)];
  Tape<T>& t = *a.tape;
  bool rg = t.requires_grad(a.id) || t.requires_grad(b.id);
  int aid = a.id, bid = b.id;
  auto out = t.record(std::move(y), rg, [aid, bid](Tape<T>& tp) {
    // out id is the node being processed; its grad is read via closure below
  });
  // record() cannot see its own id inside the lambda, so re-register:
  return rebind_binary_backward(t, out, aid, bid,
                                [](const Tensor<T>& gy, int which) {
                                  (void)which;
                                  return gy;
                                });
}

// --- The pattern above is clumsy; use an explicit builder instead. ---

// Helper: create node whose backward reads its own grad.
template <class T, class Fn>
Var<T> make_node(Tape<T>& t, Tensor<T> value, bool rg, Fn&& fn) {
  int self_id = static_cast<int>(t.size());
  return t.record(std::move(value), rg,
                  [self_id, fn = std::forward<Fn>(fn)](Tape<T>& tp) mutable {
                    fn(tp, tp.grad(self_id));
                  });
}

}  // namespace m2m::ag
