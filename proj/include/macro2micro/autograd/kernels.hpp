#pragma once

#include <Eigen/Core>

#include "macro2micro/core/tensor.hpp"
#include "macro2micro/errors.hpp"

// Plain (non-autograd) numeric kernels shared by the forward and backward
// ops. Convolutions are im2col + GEMM; everything runs single-threaded so
// results are bitwise reproducible.

namespace m2m::kernels {

template <class T>
using MatMap =
    Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <class T>
using ConstMatMap = Eigen::Map<
    const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

inline int conv_out_extent(int in, int kernel, int stride, int pad) {
  return (in + 2 * pad - kernel) / stride + 1;
}

// Unfolds one (C, H, W) image into a (C*kh*kw) x (Ho*Wo) column matrix.
template <class T>
void im2col(const T* x, int c, int h, int w, int kh, int kw, int stride,
            int pad, int ho, int wo, T* col) {
  const int64_t plane = static_cast<int64_t>(h) * w;
  const int64_t out_plane = static_cast<int64_t>(ho) * wo;
  int64_t row = 0;
  for (int ci = 0; ci < c; ++ci) {
    for (int ki = 0; ki < kh; ++ki) {
      for (int kj = 0; kj < kw; ++kj, ++row) {
        T* dst = col + row * out_plane;
        const T* src = x + ci * plane;
        for (int oy = 0; oy < ho; ++oy) {
          int iy = oy * stride + ki - pad;
          if (iy < 0 || iy >= h) {
            for (int ox = 0; ox < wo; ++ox) dst[oy * wo + ox] = T(0);
            continue;
          }
          const T* src_row = src + static_cast<int64_t>(iy) * w;
          for (int ox = 0; ox < wo; ++ox) {
            int ix = ox * stride + kj - pad;
            dst[oy * wo + ox] = (ix >= 0 && ix < w) ? src_row[ix] : T(0);
          }
        }
      }
    }
  }
}

// Scatter-add of a column matrix back onto a (C, H, W) gradient image.
template <class T>
void col2im_add(const T* col, int c, int h, int w, int kh, int kw, int stride,
                int pad, int ho, int wo, T* gx) {
  const int64_t plane = static_cast<int64_t>(h) * w;
  const int64_t out_plane = static_cast<int64_t>(ho) * wo;
  int64_t row = 0;
  for (int ci = 0; ci < c; ++ci) {
    for (int ki = 0; ki < kh; ++ki) {
      for (int kj = 0; kj < kw; ++kj, ++row) {
        const T* src = col + row * out_plane;
        T* dst = gx + ci * plane;
        for (int oy = 0; oy < ho; ++oy) {
          int iy = oy * stride + ki - pad;
          if (iy < 0 || iy >= h) continue;
          T* dst_row = dst + static_cast<int64_t>(iy) * w;
          for (int ox = 0; ox < wo; ++ox) {
            int ix = ox * stride + kj - pad;
            if (ix >= 0 && ix < w) dst_row[ix] += src[oy * wo + ox];
          }
        }
      }
    }
  }
}

// x: (N, Ci, H, W), w: (Co, Ci, kh, kw), bias: (Co) or empty -> (N, Co, Ho, Wo)
template <class T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& w,
                         const Tensor<T>& bias, int stride, int pad) {
  if (x.rank() != 4 || w.rank() != 4)
    throw ShapeMismatch("conv2d expects NCHW input and OIHW weights");
  const int n = x.dim(0), ci = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const int co = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  if (w.dim(1) != ci)
    throw ShapeMismatch("conv2d channel mismatch: input " + x.shape_str() +
                        ", weight " + w.shape_str());
  if (!bias.empty() && (bias.rank() != 1 || bias.dim(0) != co))
    throw ShapeMismatch("conv2d bias shape");
  const int ho = conv_out_extent(h, kh, stride, pad);
  const int wo = conv_out_extent(wd, kw, stride, pad);
  if (ho <= 0 || wo <= 0) throw ShapeMismatch("conv2d output would be empty");

  Tensor<T> y({n, co, ho, wo});
  const int64_t k = static_cast<int64_t>(ci) * kh * kw;
  const int64_t p = static_cast<int64_t>(ho) * wo;
  std::vector<T> col(static_cast<size_t>(k * p));
  ConstMatMap<T> wm(w.data(), co, k);
  for (int i = 0; i < n; ++i) {
    im2col(x.data() + static_cast<int64_t>(i) * ci * h * wd, ci, h, wd, kh, kw,
           stride, pad, ho, wo, col.data());
    ConstMatMap<T> cm(col.data(), k, p);
    MatMap<T> ym(y.data() + static_cast<int64_t>(i) * co * p, co, p);
    ym.noalias() = wm * cm;
    if (!bias.empty())
      for (int oc = 0; oc < co; ++oc)
        ym.row(oc).array() += bias.v[static_cast<size_t>(oc)];
  }
  return y;
}

template <class T>
struct ConvGrads {
  Tensor<T> gx, gw, gb;
};

template <class T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, const Tensor<T>& w,
                             bool has_bias, int stride, int pad,
                             const Tensor<T>& gy, bool want_gx, bool want_gw) {
  const int n = x.dim(0), ci = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const int co = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const int ho = gy.dim(2), wo = gy.dim(3);
  const int64_t k = static_cast<int64_t>(ci) * kh * kw;
  const int64_t p = static_cast<int64_t>(ho) * wo;

  ConvGrads<T> g;
  if (want_gx) g.gx = Tensor<T>(x.shape);
  Tensor<T> gw_acc(w.shape);
  if (want_gw && has_bias) g.gb = Tensor<T>({co});

  std::vector<T> col(static_cast<size_t>(k * p));
  ConstMatMap<T> wm(w.data(), co, k);
  MatMap<T> gwm(gw_acc.data(), co, k);
  for (int i = 0; i < n; ++i) {
    ConstMatMap<T> gym(gy.data() + static_cast<int64_t>(i) * co * p, co, p);
    if (want_gw) {
      im2col(x.data() + static_cast<int64_t>(i) * ci * h * wd, ci, h, wd, kh,
             kw, stride, pad, ho, wo, col.data());
      ConstMatMap<T> cm(col.data(), k, p);
      gwm.noalias() += gym * cm.transpose();
      if (has_bias)
        for (int oc = 0; oc < co; ++oc)
          g.gb.v[static_cast<size_t>(oc)] += gym.row(oc).sum();
    }
    if (want_gx) {
      MatMap<T> colm(col.data(), k, p);
      colm.noalias() = wm.transpose() * gym;
      col2im_add(col.data(), ci, h, wd, kh, kw, stride, pad, ho, wo,
                 g.gx.data() + static_cast<int64_t>(i) * ci * h * wd);
    }
  }
  if (want_gw) g.gw = std::move(gw_acc);
  return g;
}

// 2x2 stride-2 average pooling; spatial dims must be even.
template <class T>
Tensor<T> avgpool2_forward(const Tensor<T>& x) {
  if (x.rank() != 4) throw ShapeMismatch("avgpool2 expects NCHW");
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  if (h % 2 != 0 || w % 2 != 0)
    throw OddSpatialDims("avgpool2 requires even spatial dims, got " +
                         x.shape_str());
  Tensor<T> y({n, c, h / 2, w / 2});
  for (int i = 0; i < n; ++i)
    for (int ch = 0; ch < c; ++ch)
      for (int oy = 0; oy < h / 2; ++oy)
        for (int ox = 0; ox < w / 2; ++ox) {
          T s = x.at4(i, ch, 2 * oy, 2 * ox) + x.at4(i, ch, 2 * oy, 2 * ox + 1) +
                x.at4(i, ch, 2 * oy + 1, 2 * ox) +
                x.at4(i, ch, 2 * oy + 1, 2 * ox + 1);
          y.at4(i, ch, oy, ox) = s * T(0.25);
        }
  return y;
}

template <class T>
Tensor<T> avgpool2_backward(const std::vector<int>& in_shape,
                            const Tensor<T>& gy) {
  Tensor<T> gx(in_shape);
  const int n = gy.dim(0), c = gy.dim(1), ho = gy.dim(2), wo = gy.dim(3);
  for (int i = 0; i < n; ++i)
    for (int ch = 0; ch < c; ++ch)
      for (int oy = 0; oy < ho; ++oy)
        for (int ox = 0; ox < wo; ++ox) {
          T g = gy.at4(i, ch, oy, ox) * T(0.25);
          gx.at4(i, ch, 2 * oy, 2 * ox) += g;
          gx.at4(i, ch, 2 * oy, 2 * ox + 1) += g;
          gx.at4(i, ch, 2 * oy + 1, 2 * ox) += g;
          gx.at4(i, ch, 2 * oy + 1, 2 * ox + 1) += g;
        }
  return gx;
}

// Nearest-neighbor x2 upsampling.
template <class T>
Tensor<T> upsample2_forward(const Tensor<T>& x) {
  if (x.rank() != 4) throw ShapeMismatch("upsample2 expects NCHW");
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  Tensor<T> y({n, c, 2 * h, 2 * w});
  for (int i = 0; i < n; ++i)
    for (int ch = 0; ch < c; ++ch)
      for (int iy = 0; iy < h; ++iy)
        for (int ix = 0; ix < w; ++ix) {
          T v = x.at4(i, ch, iy, ix);
          y.at4(i, ch, 2 * iy, 2 * ix) = v;
          y.at4(i, ch, 2 * iy, 2 * ix + 1) = v;
          y.at4(i, ch, 2 * iy + 1, 2 * ix) = v;
          y.at4(i, ch, 2 * iy + 1, 2 * ix + 1) = v;
        }
  return y;
}

template <class T>
Tensor<T> upsample2_backward(const std::vector<int>& in_shape,
                             const Tensor<T>& gy) {
  Tensor<T> gx(in_shape);
  const int n = gx.dim(0), c = gx.dim(1), h = gx.dim(2), w = gx.dim(3);
  for (int i = 0; i < n; ++i)
    for (int ch = 0; ch < c; ++ch)
      for (int iy = 0; iy < h; ++iy)
        for (int ix = 0; ix < w; ++ix)
          gx.at4(i, ch, iy, ix) = gy.at4(i, ch, 2 * iy, 2 * ix) +
                                  gy.at4(i, ch, 2 * iy, 2 * ix + 1) +
                                  gy.at4(i, ch, 2 * iy + 1, 2 * ix) +
                                  gy.at4(i, ch, 2 * iy + 1, 2 * ix + 1);
  return gx;
}

// Bilinear resize with half-pixel centers and clamped borders.
struct BilinearTap {
  int y0, y1, x0, x1;
  double wy, wx;
};

inline BilinearTap bilinear_tap(int oy, int ox, int ih, int iw, int oh, int ow) {
  double sy = (oy + 0.5) * static_cast<double>(ih) / oh - 0.5;
  double sx = (ox + 0.5) * static_cast<double>(iw) / ow - 0.5;
  sy = std::min(std::max(sy, 0.0), static_cast<double>(ih - 1));
  sx = std::min(std::max(sx, 0.0), static_cast<double>(iw - 1));
  BilinearTap t;
  t.y0 = static_cast<int>(sy);
  t.x0 = static_cast<int>(sx);
  t.y1 = std::min(t.y0 + 1, ih - 1);
  t.x1 = std::min(t.x0 + 1, iw - 1);
  t.wy = sy - t.y0;
  t.wx = sx - t.x0;
  return t;
}

template <class T>
Tensor<T> bilinear_resize_forward(const Tensor<T>& x, int oh, int ow) {
  if (x.rank() != 4) throw ShapeMismatch("bilinear_resize expects NCHW");
  const int n = x.dim(0), c = x.dim(1), ih = x.dim(2), iw = x.dim(3);
  Tensor<T> y({n, c, oh, ow});
  for (int oy = 0; oy < oh; ++oy)
    for (int ox = 0; ox < ow; ++ox) {
      BilinearTap t = bilinear_tap(oy, ox, ih, iw, oh, ow);
      for (int i = 0; i < n; ++i)
        for (int ch = 0; ch < c; ++ch) {
          T top = static_cast<T>((1 - t.wx)) * x.at4(i, ch, t.y0, t.x0) +
                  static_cast<T>(t.wx) * x.at4(i, ch, t.y0, t.x1);
          T bot = static_cast<T>((1 - t.wx)) * x.at4(i, ch, t.y1, t.x0) +
                  static_cast<T>(t.wx) * x.at4(i, ch, t.y1, t.x1);
          y.at4(i, ch, oy, ox) =
              static_cast<T>((1 - t.wy)) * top + static_cast<T>(t.wy) * bot;
        }
    }
  return y;
}

template <class T>
Tensor<T> bilinear_resize_backward(const std::vector<int>& in_shape,
                                   const Tensor<T>& gy) {
  Tensor<T> gx(in_shape);
  const int n = gx.dim(0), c = gx.dim(1), ih = gx.dim(2), iw = gx.dim(3);
  const int oh = gy.dim(2), ow = gy.dim(3);
  for (int oy = 0; oy < oh; ++oy)
    for (int ox = 0; ox < ow; ++ox) {
      BilinearTap t = bilinear_tap(oy, ox, ih, iw, oh, ow);
      for (int i = 0; i < n; ++i)
        for (int ch = 0; ch < c; ++ch) {
          T g = gy.at4(i, ch, oy, ox);
          gx.at4(i, ch, t.y0, t.x0) += g * static_cast<T>((1 - t.wy) * (1 - t.wx));
          gx.at4(i, ch, t.y0, t.x1) += g * static_cast<T>((1 - t.wy) * t.wx);
          gx.at4(i, ch, t.y1, t.x0) += g * static_cast<T>(t.wy * (1 - t.wx));
          gx.at4(i, ch, t.y1, t.x1) += g * static_cast<T>(t.wy * t.wx);
        }
    }
  return gx;
}

}  // namespace m2m::kernels
