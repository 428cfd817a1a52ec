#pragma once

// central finite-difference gradient checking, double precision only

#include <cmath>
#include <functional>
#include <vector>

#include "egonav/common/rng.hpp"
#include "egonav/nn/tensor.hpp"

namespace gradcheck {

using egonav::Rng;
using egonav::nn::Tensor;

struct Result {
  double max_rel = 0.0;
  std::size_t checked = 0;
};

// random leaf in [-1,1]; margin pushes values away from 0 for kinked ops
inline Tensor<double> leaf(egonav::nn::Shape shape, std::uint64_t seed,
                           double margin = 0.0) {
  Tensor<double> t(std::move(shape));
  Rng rng(seed);
  for (auto& v : t.mutable_values()) {
    v = rng.uniform(-1.0, 1.0);
    v += v >= 0 ? margin : -margin;
  }
  t.set_requires_grad(true);
  return t;
}

inline Tensor<double> leaf_in(egonav::nn::Shape shape, std::uint64_t seed, double lo,
                              double hi) {
  Tensor<double> t(std::move(shape));
  Rng rng(seed);
  for (auto& v : t.mutable_values()) v = rng.uniform(lo, hi);
  t.set_requires_grad(true);
  return t;
}

// `loss` must rebuild its graph from the leaves' current values on each call
inline Result check(std::vector<Tensor<double>> leaves,
                    const std::function<Tensor<double>()>& loss, double h = 1e-5) {
  for (auto& l : leaves) l.zero_grad();
  auto root = loss();
  root.backward();

  Result res;
  for (auto& l : leaves) {
    auto vals = l.mutable_values();
    const auto grads = l.grad();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double keep = vals[i];
      double lp, lm;
      {
        egonav::nn::NoGradGuard ng;
        vals[i] = keep + h;
        lp = loss().item();
        vals[i] = keep - h;
        lm = loss().item();
      }
      vals[i] = keep;
      const double fd = (lp - lm) / (2.0 * h);
      const double ad = grads[i];
      const double rel =
          std::fabs(ad - fd) / std::max({std::fabs(ad), std::fabs(fd), 1e-3});
      if (rel > res.max_rel) res.max_rel = rel;
      ++res.checked;
    }
  }
  return res;
}

// weighted sum collapses an op output to a scalar so every element matters
inline Tensor<double> scalarize(const Tensor<double>& y, std::uint64_t seed) {
  Tensor<double> w(y.shape());
  Rng rng(seed);
  for (auto& v : w.mutable_values()) v = rng.uniform(0.25, 1.0);
  return egonav::nn::mean_all(egonav::nn::mul(y, w));
}

}  // namespace gradcheck
