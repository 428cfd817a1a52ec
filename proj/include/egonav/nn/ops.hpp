#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "egonav/nn/gemm.hpp"
#include "egonav/nn/tensor.hpp"

namespace egonav::nn {

namespace detail {

// first/last output column whose tap ox*stride - pad + k lands inside [0, extent)
inline int tap_lo(int k, int stride, int pad) {
  const int d = pad - k;
  return d <= 0 ? 0 : (d + stride - 1) / stride;
}
inline int tap_hi(int k, int stride, int pad, int extent, int out) {
  const int d = extent - 1 + pad - k;
  return d < 0 ? 0 : std::min(out, d / stride + 1);
}

// col rows are C*kh*kw taps, row stride ld >= Ho*Wo; out-of-image taps are zero
template <typename T>
void im2col(const T* x, int c_in, int h, int w, int kh, int kw, int stride, int pad,
            int ho, int wo, T* col, std::size_t ld) {
  const int spatial = ho * wo;
  for (int c = 0; c < c_in; ++c) {
    for (int ky = 0; ky < kh; ++ky) {
      const int oy_lo = tap_lo(ky, stride, pad), oy_hi = tap_hi(ky, stride, pad, h, ho);
      for (int kx = 0; kx < kw; ++kx) {
        T* row = col + (std::size_t)((c * kh + ky) * kw + kx) * ld;
        const int ox_lo = tap_lo(kx, stride, pad), ox_hi = tap_hi(kx, stride, pad, w, wo);
        std::fill(row, row + (std::size_t)oy_lo * wo, T(0));
        std::fill(row + (std::size_t)oy_hi * wo, row + spatial, T(0));
        for (int oy = oy_lo; oy < oy_hi; ++oy) {
          const T* src = x + (std::size_t)(c * h + oy * stride - pad + ky) * w;
          T* dst = row + (std::size_t)oy * wo;
          std::fill(dst, dst + ox_lo, T(0));
          std::fill(dst + ox_hi, dst + wo, T(0));
          if (stride == 1) {
            std::copy(src + ox_lo - pad + kx, src + ox_hi - pad + kx, dst + ox_lo);
          } else {
            for (int ox = ox_lo; ox < ox_hi; ++ox) dst[ox] = src[ox * stride - pad + kx];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* col, int c_in, int h, int w, int kh, int kw, int stride,
                int pad, int ho, int wo, T* x, std::size_t ld) {
  for (int c = 0; c < c_in; ++c) {
    for (int ky = 0; ky < kh; ++ky) {
      const int oy_lo = tap_lo(ky, stride, pad), oy_hi = tap_hi(ky, stride, pad, h, ho);
      for (int kx = 0; kx < kw; ++kx) {
        const T* row = col + (std::size_t)((c * kh + ky) * kw + kx) * ld;
        const int ox_lo = tap_lo(kx, stride, pad), ox_hi = tap_hi(kx, stride, pad, w, wo);
        for (int oy = oy_lo; oy < oy_hi; ++oy) {
          T* dst = x + (std::size_t)(c * h + oy * stride - pad + ky) * w;
          const T* srow = row + (std::size_t)oy * wo;
          if (stride == 1) {
            const int off = kx - pad;
            for (int ox = ox_lo; ox < ox_hi; ++ox) dst[ox + off] += srow[ox];
          } else {
            for (int ox = ox_lo; ox < ox_hi; ++ox) dst[ox * stride - pad + kx] += srow[ox];
          }
        }
      }
    }
  }
}

// images per GEMM so the packed col + result buffers stay cache/RAM friendly
inline int conv_chunk(int n, int k, int f, int spatial) {
  const std::size_t budget = std::size_t(4) << 20;  // elements per scratch buffer
  const std::size_t per_image = (std::size_t)std::max(k, f) * spatial;
  return std::max(1, (int)std::min<std::size_t>(n, budget / per_image));
}

template <typename T>
std::vector<T>& scratch_a() {
  thread_local std::vector<T> buf;
  return buf;
}
template <typename T>
std::vector<T>& scratch_b() {
  thread_local std::vector<T> buf;
  return buf;
}

}  // namespace detail

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  check(a.shape() == b.shape(), "add: shapes differ ", shape_str(a.shape()), " vs ",
        shape_str(b.shape()));
  Buf<T> out(a.size());
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return make_op<T>("add", a.shape(), std::move(out), {a, b},
                    [pa = a.node(), pb = b.node()](Node<T>& self) {
                      accumulate_grad(pa, self.grad.data(), self.grad.size());
                      accumulate_grad(pb, self.grad.data(), self.grad.size());
                    });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  check(a.shape() == b.shape(), "mul: shapes differ ", shape_str(a.shape()), " vs ",
        shape_str(b.shape()));
  Buf<T> out(a.size());
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return make_op<T>("mul", a.shape(), std::move(out), {a, b},
                    [pa = a.node(), pb = b.node()](Node<T>& self) {
                      if (pa->requires_grad) {
                        for (std::size_t i = 0; i < self.grad.size(); ++i) {
                          pa->grad[i] += self.grad[i] * pb->value[i];
                        }
                      }
                      if (pb->requires_grad) {
                        for (std::size_t i = 0; i < self.grad.size(); ++i) {
                          pb->grad[i] += self.grad[i] * pa->value[i];
                        }
                      }
                    });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  Buf<T> out(a.size());
  const auto av = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * factor;
  return make_op<T>("scale", a.shape(), std::move(out), {a},
                    [pa = a.node(), factor](Node<T>& self) {
                      if (!pa->requires_grad) return;
                      for (std::size_t i = 0; i < self.grad.size(); ++i) {
                        pa->grad[i] += self.grad[i] * factor;
                      }
                    });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& a) {
  Buf<T> out(a.size());
  const auto av = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] > T(0) ? av[i] : T(0);
  return make_op<T>("relu", a.shape(), std::move(out), {a},
                    [pa = a.node()](Node<T>& self) {
                      if (!pa->requires_grad) return;
                      for (std::size_t i = 0; i < self.grad.size(); ++i) {
                        if (pa->value[i] > T(0)) pa->grad[i] += self.grad[i];
                      }
                    });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a) {
  Buf<T> out(a.size());
  const auto av = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = T(1) / (T(1) + std::exp(-av[i]));
  }
  return make_op<T>("sigmoid", a.shape(), std::move(out), {a},
                    [pa = a.node()](Node<T>& self) {
                      if (!pa->requires_grad) return;
                      for (std::size_t i = 0; i < self.grad.size(); ++i) {
                        const T y = self.value[i];
                        pa->grad[i] += self.grad[i] * y * (T(1) - y);
                      }
                    });
}

template <typename T>
Tensor<T> tanh_act(const Tensor<T>& a) {
  Buf<T> out(a.size());
  const auto av = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(av[i]);
  return make_op<T>("tanh", a.shape(), std::move(out), {a},
                    [pa = a.node()](Node<T>& self) {
                      if (!pa->requires_grad) return;
                      for (std::size_t i = 0; i < self.grad.size(); ++i) {
                        const T y = self.value[i];
                        pa->grad[i] += self.grad[i] * (T(1) - y * y);
                      }
                    });
}

// y[N,Out] = x[N,In] * w[Out,In]^T + b
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b = {}) {
  check(x.rank() == 2, "linear: input must be [N,In], got ", shape_str(x.shape()));
  check(w.rank() == 2, "linear: weight must be [Out,In], got ", shape_str(w.shape()));
  const int n = x.dim(0);
  const int in = x.dim(1);
  const int out_dim = w.dim(0);
  check(w.dim(1) == in, "linear: weight expects ", w.dim(1), " inputs, got ", in);
  const bool has_bias = b.defined();
  if (has_bias) {
    check(b.rank() == 1 && b.dim(0) == out_dim, "linear: bias must be [", out_dim,
          "], got ", shape_str(b.shape()));
  }
  Buf<T> out((std::size_t)n * out_dim);
  gemm(false, true, n, out_dim, in, T(1), x.values().data(), in, w.values().data(), in,
       T(0), out.data(), out_dim);
  if (has_bias) {
    const auto bv = b.values();
    for (int i = 0; i < n; ++i) {
      T* row = out.data() + (std::size_t)i * out_dim;
      for (int o = 0; o < out_dim; ++o) row[o] += bv[o];
    }
  }
  std::vector<Tensor<T>> parents = {x, w};
  if (has_bias) parents.push_back(b);
  return make_op<T>(
      "linear", {n, out_dim}, std::move(out), parents,
      [px = x.node(), pw = w.node(), pb = has_bias ? b.node() : nullptr, n, in,
       out_dim](Node<T>& self) {
        const T* g = self.grad.data();
        if (px->requires_grad) {
          gemm(false, false, n, in, out_dim, T(1), g, out_dim, pw->value.data(), in,
               T(1), px->grad.data(), in);
        }
        if (pw->requires_grad) {
          gemm(true, false, out_dim, in, n, T(1), g, out_dim, px->value.data(), in,
               T(1), pw->grad.data(), in);
        }
        if (pb && pb->requires_grad) {
          for (int i = 0; i < n; ++i) {
            const T* row = g + (std::size_t)i * out_dim;
            for (int o = 0; o < out_dim; ++o) pb->grad[o] += row[o];
          }
        }
      });
}

// y[N,F,Ho,Wo] = conv(x[N,C,H,W], w[F,C,kh,kw]) + b, zero padding
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b = {},
                 int stride = 1, int pad = 0) {
  check(x.rank() == 4, "conv2d: input must be [N,C,H,W], got ", shape_str(x.shape()));
  check(w.rank() == 4, "conv2d: weight must be [F,C,kh,kw], got ", shape_str(w.shape()));
  check(stride >= 1, "conv2d: stride must be >= 1, got ", stride);
  check(pad >= 0, "conv2d: pad must be >= 0, got ", pad);
  const int n = x.dim(0), c_in = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const int f = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  check(w.dim(1) == c_in, "conv2d: weight expects ", w.dim(1), " channels, input has ",
        c_in);
  check(h + 2 * pad >= kh && wd + 2 * pad >= kw, "conv2d: kernel ", kh, "x", kw,
        " larger than padded input ", h + 2 * pad, "x", wd + 2 * pad);
  const int ho = (h + 2 * pad - kh) / stride + 1;
  const int wo = (wd + 2 * pad - kw) / stride + 1;
  const bool has_bias = b.defined();
  if (has_bias) {
    check(b.rank() == 1 && b.dim(0) == f, "conv2d: bias must be [", f, "], got ",
          shape_str(b.shape()));
  }
  const int k = c_in * kh * kw;
  const int spatial = ho * wo;
  const int chunk = detail::conv_chunk(n, k, f, spatial);
  const std::size_t ld = (std::size_t)chunk * spatial;
  auto& col = detail::scratch_a<T>();
  col.resize((std::size_t)k * ld);
  auto& buf = detail::scratch_b<T>();
  buf.resize((std::size_t)f * ld);
  Buf<T> out((std::size_t)n * f * spatial);
  const T* xv = x.values().data();
  const T* wv = w.values().data();
  // images are packed side by side so each chunk is a single wide GEMM
  for (int i0 = 0; i0 < n; i0 += chunk) {
    const int m = std::min(chunk, n - i0);
    for (int j = 0; j < m; ++j) {
      detail::im2col(xv + (std::size_t)(i0 + j) * c_in * h * wd, c_in, h, wd, kh, kw,
                     stride, pad, ho, wo, col.data() + (std::size_t)j * spatial, ld);
    }
    gemm(false, false, f, m * spatial, k, T(1), wv, k, col.data(), ld, T(0),
         buf.data(), ld);
    for (int j = 0; j < m; ++j) {
      for (int ff = 0; ff < f; ++ff) {
        const T* src = buf.data() + (std::size_t)ff * ld + (std::size_t)j * spatial;
        T* dst = out.data() + ((std::size_t)(i0 + j) * f + ff) * spatial;
        const T bias = has_bias ? b.values()[ff] : T(0);
        for (int s = 0; s < spatial; ++s) dst[s] = src[s] + bias;
      }
    }
  }
  std::vector<Tensor<T>> parents = {x, w};
  if (has_bias) parents.push_back(b);
  return make_op<T>(
      "conv2d", {n, f, ho, wo}, std::move(out), parents,
      [px = x.node(), pw = w.node(), pb = has_bias ? b.node() : nullptr, n, c_in, h,
       wd, f, kh, kw, stride, pad, ho, wo, k, spatial](Node<T>& self) {
        const int chunk = detail::conv_chunk(n, k, f, spatial);
        const std::size_t ld = (std::size_t)chunk * spatial;
        auto& col = detail::scratch_a<T>();
        col.resize((std::size_t)k * ld);
        auto& buf = detail::scratch_b<T>();
        buf.resize((std::size_t)f * ld);
        const T* g = self.grad.data();
        for (int i0 = 0; i0 < n; i0 += chunk) {
          const int m = std::min(chunk, n - i0);
          for (int j = 0; j < m; ++j) {
            for (int ff = 0; ff < f; ++ff) {
              const T* src = g + ((std::size_t)(i0 + j) * f + ff) * spatial;
              std::copy(src, src + spatial,
                        buf.data() + (std::size_t)ff * ld + (std::size_t)j * spatial);
            }
          }
          if (pw->requires_grad) {
            // dW += dY * col^T  (recompute im2col instead of caching it)
            for (int j = 0; j < m; ++j) {
              detail::im2col(px->value.data() + (std::size_t)(i0 + j) * c_in * h * wd,
                             c_in, h, wd, kh, kw, stride, pad, ho, wo,
                             col.data() + (std::size_t)j * spatial, ld);
            }
            gemm(false, true, f, k, m * spatial, T(1), buf.data(), ld, col.data(), ld,
                 T(1), pw->grad.data(), k);
          }
          if (px->requires_grad) {
            // dcol = W^T * dY, scattered back with col2im
            gemm(true, false, k, m * spatial, f, T(1), pw->value.data(), k, buf.data(),
                 ld, T(0), col.data(), ld);
            for (int j = 0; j < m; ++j) {
              detail::col2im_add(col.data() + (std::size_t)j * spatial, c_in, h, wd, kh,
                                 kw, stride, pad, ho, wo,
                                 px->grad.data() + (std::size_t)(i0 + j) * c_in * h * wd,
                                 ld);
            }
          }
        }
        if (pb && pb->requires_grad) {
          for (int i = 0; i < n; ++i) {
            for (int ff = 0; ff < f; ++ff) {
              const T* plane = g + ((std::size_t)i * f + ff) * spatial;
              T acc = T(0);
              for (int s = 0; s < spatial; ++s) acc += plane[s];
              pb->grad[ff] += acc;
            }
          }
        }
      });
}

template <typename T>
Tensor<T> maxpool2d(const Tensor<T>& x, int kernel, int stride = 0) {
  check(x.rank() == 4, "maxpool2d: input must be [N,C,H,W], got ",
        shape_str(x.shape()));
  check(kernel >= 1, "maxpool2d: kernel must be >= 1, got ", kernel);
  if (stride <= 0) stride = kernel;
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  check(h >= kernel && w >= kernel, "maxpool2d: kernel ", kernel, " exceeds input ", h,
        "x", w);
  const int ho = (h - kernel) / stride + 1;
  const int wo = (w - kernel) / stride + 1;
  Buf<T> out((std::size_t)n * c * ho * wo);
  auto argmax = std::make_shared<std::vector<std::int64_t>>(out.size());
  const T* xv = x.values().data();
  std::size_t oi = 0;
  for (int i = 0; i < n; ++i) {
    for (int cc = 0; cc < c; ++cc) {
      const T* plane = xv + ((std::size_t)i * c + cc) * h * w;
      const std::size_t plane_off = ((std::size_t)i * c + cc) * h * w;
      for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox, ++oi) {
          T best = -std::numeric_limits<T>::infinity();
          std::int64_t best_at = 0;
          for (int ky = 0; ky < kernel; ++ky) {
            const int y = oy * stride + ky;
            for (int kx = 0; kx < kernel; ++kx) {
              const int xx = ox * stride + kx;
              const T v = plane[y * w + xx];
              if (v > best) {
                best = v;
                best_at = plane_off + y * w + xx;
              }
            }
          }
          out[oi] = best;
          (*argmax)[oi] = best_at;
        }
      }
    }
  }
  return make_op<T>("maxpool2d", {n, c, ho, wo}, std::move(out), {x},
                    [px = x.node(), argmax](Node<T>& self) {
                      if (!px->requires_grad) return;
                      for (std::size_t i = 0; i < self.grad.size(); ++i) {
                        px->grad[(*argmax)[i]] += self.grad[i];
                      }
                    });
}

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x) {
  check(x.rank() == 4, "global_avg_pool: input must be [N,C,H,W], got ",
        shape_str(x.shape()));
  const int n = x.dim(0), c = x.dim(1);
  const int spatial = x.dim(2) * x.dim(3);
  Buf<T> out((std::size_t)n * c);
  const T* xv = x.values().data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const T* plane = xv + i * spatial;
    T acc = T(0);
    for (int s = 0; s < spatial; ++s) acc += plane[s];
    out[i] = acc / T(spatial);
  }
  return make_op<T>("global_avg_pool", {n, c}, std::move(out), {x},
                    [px = x.node(), spatial](Node<T>& self) {
                      if (!px->requires_grad) return;
                      for (std::size_t i = 0; i < self.grad.size(); ++i) {
                        const T g = self.grad[i] / T(spatial);
                        T* plane = px->grad.data() + i * spatial;
                        for (int s = 0; s < spatial; ++s) plane[s] += g;
                      }
                    });
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, int axis) {
  check(!parts.empty(), "concat: no inputs");
  const int rank = parts[0].rank();
  check(axis >= 0 && axis < rank, "concat: axis ", axis, " out of range for rank ",
        rank);
  Shape out_shape = parts[0].shape();
  out_shape[axis] = 0;
  for (const auto& p : parts) {
    check(p.rank() == rank, "concat: rank mismatch");
    for (int d = 0; d < rank; ++d) {
      if (d != axis) {
        check(p.dim(d) == parts[0].dim(d), "concat: dim ", d, " mismatch: ", p.dim(d),
              " vs ", parts[0].dim(d));
      }
    }
    out_shape[axis] += p.dim(axis);
  }
  std::size_t outer = 1;
  for (int d = 0; d < axis; ++d) outer *= (std::size_t)out_shape[d];
  std::size_t tail = 1;
  for (int d = axis + 1; d < rank; ++d) tail *= (std::size_t)out_shape[d];
  const std::size_t out_row = (std::size_t)out_shape[axis] * tail;
  Buf<T> out(shape_numel(out_shape));
  std::size_t offset = 0;
  std::vector<std::size_t> part_rows(parts.size());
  for (std::size_t pi = 0; pi < parts.size(); ++pi) {
    const std::size_t row = (std::size_t)parts[pi].dim(axis) * tail;
    part_rows[pi] = row;
    const T* src = parts[pi].values().data();
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy(src + o * row, src + (o + 1) * row, out.data() + o * out_row + offset);
    }
    offset += row;
  }
  std::vector<std::shared_ptr<Node<T>>> nodes;
  for (const auto& p : parts) nodes.push_back(p.node());
  return make_op<T>("concat", out_shape, std::move(out), parts,
                    [nodes, part_rows, outer, out_row](Node<T>& self) {
                      std::size_t offset = 0;
                      for (std::size_t pi = 0; pi < nodes.size(); ++pi) {
                        const std::size_t row = part_rows[pi];
                        if (nodes[pi]->requires_grad) {
                          for (std::size_t o = 0; o < outer; ++o) {
                            const T* g = self.grad.data() + o * out_row + offset;
                            T* dst = nodes[pi]->grad.data() + o * row;
                            for (std::size_t i = 0; i < row; ++i) dst[i] += g[i];
                          }
                        }
                        offset += row;
                      }
                    });
}

template <typename T>
Tensor<T> slice(const Tensor<T>& x, int axis, int start, int len) {
  const int rank = x.rank();
  check(axis >= 0 && axis < rank, "slice: axis ", axis, " out of range for rank ",
        rank);
  check(start >= 0 && len > 0 && start + len <= x.dim(axis), "slice: [", start, ", ",
        start + len, ") out of range for dim ", x.dim(axis));
  Shape out_shape = x.shape();
  out_shape[axis] = len;
  std::size_t outer = 1;
  for (int d = 0; d < axis; ++d) outer *= (std::size_t)out_shape[d];
  std::size_t tail = 1;
  for (int d = axis + 1; d < rank; ++d) tail *= (std::size_t)out_shape[d];
  const std::size_t in_row = (std::size_t)x.dim(axis) * tail;
  const std::size_t out_row = (std::size_t)len * tail;
  const std::size_t skip = (std::size_t)start * tail;
  Buf<T> out(shape_numel(out_shape));
  const T* src = x.values().data();
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy(src + o * in_row + skip, src + o * in_row + skip + out_row,
              out.data() + o * out_row);
  }
  return make_op<T>("slice", out_shape, std::move(out), {x},
                    [px = x.node(), outer, in_row, out_row, skip](Node<T>& self) {
                      if (!px->requires_grad) return;
                      for (std::size_t o = 0; o < outer; ++o) {
                        const T* g = self.grad.data() + o * out_row;
                        T* dst = px->grad.data() + o * in_row + skip;
                        for (std::size_t i = 0; i < out_row; ++i) dst[i] += g[i];
                      }
                    });
}

// feature-wise affine modulation: y[n,c,:,:] = (1 + s[n,c]) * x[n,c,:,:] + t[n,c]
template <typename T>
Tensor<T> film(const Tensor<T>& x, const Tensor<T>& s, const Tensor<T>& t) {
  check(x.rank() == 4, "film: input must be [N,C,H,W], got ", shape_str(x.shape()));
  const int n = x.dim(0), c = x.dim(1);
  const int spatial = x.dim(2) * x.dim(3);
  check(s.rank() == 2 && s.dim(0) == n && s.dim(1) == c, "film: scale must be [", n,
        ",", c, "], got ", shape_str(s.shape()));
  check(t.rank() == 2 && t.dim(0) == n && t.dim(1) == c, "film: shift must be [", n,
        ",", c, "], got ", shape_str(t.shape()));
  Buf<T> out(x.size());
  const T* xv = x.values().data();
  const T* sv = s.values().data();
  const T* tv = t.values().data();
  for (std::size_t i = 0; i < (std::size_t)n * c; ++i) {
    const T gain = T(1) + sv[i];
    const T shift = tv[i];
    const T* src = xv + i * spatial;
    T* dst = out.data() + i * spatial;
    for (int p = 0; p < spatial; ++p) dst[p] = gain * src[p] + shift;
  }
  return make_op<T>(
      "film", x.shape(), std::move(out), {x, s, t},
      [px = x.node(), ps = s.node(), pt = t.node(), n, c, spatial](Node<T>& self) {
        const T* g = self.grad.data();
        for (std::size_t i = 0; i < (std::size_t)n * c; ++i) {
          const T* gi = g + i * spatial;
          if (px->requires_grad) {
            const T gain = T(1) + ps->value[i];
            T* dst = px->grad.data() + i * spatial;
            for (int p = 0; p < spatial; ++p) dst[p] += gain * gi[p];
          }
          if (ps->requires_grad) {
            const T* xv = px->value.data() + i * spatial;
            T acc = T(0);
            for (int p = 0; p < spatial; ++p) acc += gi[p] * xv[p];
            ps->grad[i] += acc;
          }
          if (pt->requires_grad) {
            T acc = T(0);
            for (int p = 0; p < spatial; ++p) acc += gi[p];
            pt->grad[i] += acc;
          }
        }
      });
}

template <typename T>
Tensor<T> mean_all(const Tensor<T>& x) {
  const std::size_t n = x.size();
  check(n > 0, "mean_all: empty tensor");
  T acc = T(0);
  for (T v : x.values()) acc += v;
  return make_op<T>("mean_all", {1}, Buf<T>{acc / T(n)}, {x},
                    [px = x.node(), n](Node<T>& self) {
                      if (!px->requires_grad) return;
                      const T g = self.grad[0] / T(n);
                      for (std::size_t i = 0; i < n; ++i) px->grad[i] += g;
                    });
}

}  // namespace egonav::nn
