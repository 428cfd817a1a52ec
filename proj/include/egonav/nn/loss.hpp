#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "egonav/nn/tensor.hpp"

namespace egonav::nn {

// class-weighted focal loss on independent per-class probabilities;
// gamma = 0 with unit weights reduces to plain binary cross-entropy
template <typename T>
struct FocalConfig {
  T gamma = T(2);
  std::vector<T> alpha = {T(1.2), T(1.2), T(0.6)};  // per class, mean 1
};

template <typename T>
FocalConfig<T> bce_config(int classes = 3) {
  FocalConfig<T> cfg;
  cfg.gamma = T(0);
  cfg.alpha.assign(classes, T(1));
  return cfg;
}

// probs, targets: [N, C]; targets must be exactly 0 or 1
template <typename T>
Tensor<T> focal_loss(const Tensor<T>& probs, const Tensor<T>& targets,
                     const FocalConfig<T>& cfg = {}) {
  check(probs.rank() == 2, "focal_loss: probs must be [N,C], got ",
        shape_str(probs.shape()));
  check(probs.shape() == targets.shape(), "focal_loss: probs ",
        shape_str(probs.shape()), " vs targets ", shape_str(targets.shape()));
  const int classes = probs.dim(1);
  check(static_cast<int>(cfg.alpha.size()) == classes, "focal_loss: ",
        cfg.alpha.size(), " class weights for ", classes, " classes");
  check(cfg.gamma >= T(0), "focal_loss: gamma must be non-negative");
  const std::size_t n = probs.size();
  check(n > 0, "focal_loss: empty batch");

  // clamp keeps log and the p=0/1 gradients finite
  const T eps = sizeof(T) == 4 ? T(1e-6) : T(1e-12);
  const auto pv = probs.values();
  const auto yv = targets.values();
  T total = T(0);
  for (std::size_t i = 0; i < n; ++i) {
    const T praw = pv[i];
    check(praw >= T(0) && praw <= T(1) && std::isfinite((double)praw),
          "focal_loss: probability out of [0,1] at index ", i);
    const T y = yv[i];
    check(y == T(0) || y == T(1), "focal_loss: target must be 0 or 1 at index ", i);
    const T a = cfg.alpha[i % classes];
    const T p = std::clamp(praw, eps, T(1) - eps);
    if (y == T(1)) {
      const T w = cfg.gamma == T(0) ? T(1) : std::pow(T(1) - p, cfg.gamma);
      total += -a * w * std::log(p);
    } else {
      const T w = cfg.gamma == T(0) ? T(1) : std::pow(p, cfg.gamma);
      total += -a * w * std::log(T(1) - p);
    }
  }
  return make_op<T>(
      "focal_loss", {1}, Buf<T>{total / T(n)}, {probs},
      [pp = probs.node(), pt = targets.node(), cfg, classes, eps, n](Node<T>& self) {
        if (!pp->requires_grad) return;
        const T g = self.grad[0] / T(n);
        for (std::size_t i = 0; i < n; ++i) {
          const T y = pt->value[i];
          const T a = cfg.alpha[i % classes];
          const T p = std::clamp(pp->value[i], eps, T(1) - eps);
          T d;
          if (y == T(1)) {
            if (cfg.gamma == T(0)) {
              d = -a / p;
            } else {
              const T q = T(1) - p;
              d = -a * (-cfg.gamma * std::pow(q, cfg.gamma - T(1)) * std::log(p) +
                        std::pow(q, cfg.gamma) / p);
            }
          } else {
            if (cfg.gamma == T(0)) {
              d = a / (T(1) - p);
            } else {
              d = -a * (cfg.gamma * std::pow(p, cfg.gamma - T(1)) * std::log(T(1) - p) -
                        std::pow(p, cfg.gamma) / (T(1) - p));
            }
          }
          pp->grad[i] += g * d;
        }
      });
}

}  // namespace egonav::nn
