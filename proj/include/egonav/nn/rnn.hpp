#pragma once

#include <utility>

#include "egonav/nn/ops.hpp"

namespace egonav::nn {

// gate packing order everywhere: input, forget, cell, output

template <typename T>
struct LstmParams {
  Tensor<T> w_ih;  // [4H, In]
  Tensor<T> w_hh;  // [4H, H]
  Tensor<T> b;     // [4H]
};

template <typename T>
std::pair<Tensor<T>, Tensor<T>> lstm_cell(const Tensor<T>& x, const Tensor<T>& h,
                                          const Tensor<T>& c, const LstmParams<T>& p) {
  check(h.rank() == 2 && c.rank() == 2, "lstm_cell: states must be [N,H]");
  const int hidden = h.dim(1);
  check(p.w_ih.dim(0) == 4 * hidden && p.w_hh.dim(0) == 4 * hidden &&
            p.w_hh.dim(1) == hidden,
        "lstm_cell: weights do not match hidden size ", hidden);
  auto gates = add(linear(x, p.w_ih, p.b), linear(h, p.w_hh));
  auto gi = sigmoid(slice(gates, 1, 0, hidden));
  auto gf = sigmoid(slice(gates, 1, hidden, hidden));
  auto gg = tanh_act(slice(gates, 1, 2 * hidden, hidden));
  auto go = sigmoid(slice(gates, 1, 3 * hidden, hidden));
  auto c_new = add(mul(gf, c), mul(gi, gg));
  auto h_new = mul(go, tanh_act(c_new));
  return {h_new, c_new};
}

template <typename T>
struct ConvLstmParams {
  Tensor<T> w_x;  // [4C, Cin, 3, 3]
  Tensor<T> w_h;  // [4C, C, 3, 3]
  Tensor<T> b;    // [4C]
};

// 3x3 same-padding convolutional LSTM step; states are [N,C,H,W]
template <typename T>
std::pair<Tensor<T>, Tensor<T>> convlstm_cell(const Tensor<T>& x, const Tensor<T>& h,
                                              const Tensor<T>& c,
                                              const ConvLstmParams<T>& p) {
  check(h.rank() == 4 && c.rank() == 4, "convlstm_cell: states must be [N,C,H,W]");
  const int channels = h.dim(1);
  check(p.w_x.dim(0) == 4 * channels && p.w_h.dim(0) == 4 * channels &&
            p.w_h.dim(1) == channels,
        "convlstm_cell: weights do not match state channels ", channels);
  auto gates = add(conv2d(x, p.w_x, p.b, 1, 1), conv2d(h, p.w_h, {}, 1, 1));
  auto gi = sigmoid(slice(gates, 1, 0, channels));
  auto gf = sigmoid(slice(gates, 1, channels, channels));
  auto gg = tanh_act(slice(gates, 1, 2 * channels, channels));
  auto go = sigmoid(slice(gates, 1, 3 * channels, channels));
  auto c_new = add(mul(gf, c), mul(gi, gg));
  auto h_new = mul(go, tanh_act(c_new));
  return {h_new, c_new};
}

}  // namespace egonav::nn
