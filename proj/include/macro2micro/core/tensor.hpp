#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "macro2micro/core/rng.hpp"
#include "macro2micro/errors.hpp"

namespace m2m {

// Dense row-major tensor. Rank is dynamic; the networks use NCHW layouts,
// metrics and I/O mostly use rank-2 (H, W) images.
template <class T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> v;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    v.assign(static_cast<size_t>(numel_of(shape)), T(0));
  }
  Tensor(std::vector<int> s, std::vector<T> data)
      : shape(std::move(s)), v(std::move(data)) {
    if (static_cast<int64_t>(v.size()) != numel_of(shape))
      throw ShapeMismatch("tensor data size does not match shape");
  }

  static int64_t numel_of(const std::vector<int>& s) {
    int64_t n = 1;
    for (int d : s) {
      if (d < 0) throw ShapeMismatch("negative dimension");
      n *= d;
    }
    return n;
  }

  int64_t numel() const { return static_cast<int64_t>(v.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<size_t>(i)]; }
  bool empty() const { return v.empty(); }

  T* data() { return v.data(); }
  const T* data() const { return v.data(); }

  // Rank-specific element access (unchecked bounds; shapes are validated at
  // op boundaries).
  T& at2(int i, int j) { return v[static_cast<size_t>(i) * dim(1) + j]; }
  T at2(int i, int j) const { return v[static_cast<size_t>(i) * dim(1) + j]; }
  T& at4(int n, int c, int h, int w) {
    return v[((static_cast<size_t>(n) * dim(1) + c) * dim(2) + h) * dim(3) + w];
  }
  T at4(int n, int c, int h, int w) const {
    return v[((static_cast<size_t>(n) * dim(1) + c) * dim(2) + h) * dim(3) + w];
  }

  void fill(T x) { std::fill(v.begin(), v.end(), x); }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  bool all_finite() const {
    for (T x : v)
      if (!std::isfinite(static_cast<double>(x))) return false;
    return true;
  }

  T min_value() const {
    T m = v.empty() ? T(0) : v[0];
    for (T x : v) m = std::min(m, x);
    return m;
  }
  T max_value() const {
    T m = v.empty() ? T(0) : v[0];
    for (T x : v) m = std::max(m, x);
    return m;
  }

  std::string shape_str() const {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < shape.size(); ++i)
      os << shape[i] << (i + 1 < shape.size() ? "," : "");
    os << ")";
    return os.str();
  }
};

using TensorF = Tensor<float>;
// 2D grayscale image in [0,1], shape (H, W).
using Image = Tensor<float>;

template <class T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b,
                        const char* where) {
  if (!a.same_shape(b))
    throw ShapeMismatch(std::string(where) + ": " + a.shape_str() + " vs " +
                        b.shape_str());
}

template <class T>
Tensor<T> random_uniform(std::vector<int> shape, Pcg32& rng, T lo = T(0),
                         T hi = T(1)) {
  Tensor<T> t(std::move(shape));
  for (auto& x : t.v) x = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

template <class T>
Tensor<T> random_normal(std::vector<int> shape, Pcg32& rng, T stddev = T(1)) {
  Tensor<T> t(std::move(shape));
  for (auto& x : t.v) x = static_cast<T>(rng.normal() * stddev);
  return t;
}

// Lossless float <-> double conversion helpers for mixed-precision tests.
template <class To, class From>
Tensor<To> cast_tensor(const Tensor<From>& a) {
  Tensor<To> out(a.shape);
  for (int64_t i = 0; i < a.numel(); ++i)
    out.v[static_cast<size_t>(i)] = static_cast<To>(a.v[static_cast<size_t>(i)]);
  return out;
}

}  // namespace m2m
