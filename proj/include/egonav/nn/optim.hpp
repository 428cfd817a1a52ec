#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>
#include <vector>

#include "egonav/common/rng.hpp"
#include "egonav/nn/tensor.hpp"

namespace egonav::nn {

enum class ParamGroup { kFromScratch, kFineTuned };
enum class Init { kZero, kUniformFanIn };

template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  ParamGroup group = ParamGroup::kFromScratch;
};

// named trainable parameters in creation order; initialization draws come from
// a per-name stream so layer order does not change the numbers
template <typename T>
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t init_seed = 0) : seed_(init_seed) {}

  Tensor<T> create(const std::string& name, Shape shape, Init init,
                   ParamGroup group = ParamGroup::kFromScratch) {
    check(index_.find(name) == index_.end(), "duplicate parameter \"", name, "\"");
    Tensor<T> t(shape);
    if (init == Init::kUniformFanIn) {
      std::size_t fan_in = 1;
      for (std::size_t d = 1; d < shape.size(); ++d) {
        fan_in *= static_cast<std::size_t>(shape[d]);
      }
      // He bound: keeps activation scale steady through deep relu stacks
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
      Rng rng = Rng::from_stream(seed_, fnv1a(name));
      auto v = t.mutable_values();
      for (auto& x : v) x = static_cast<T>(rng.uniform(-bound, bound));
    }
    t.set_requires_grad(true);
    index_[name] = params_.size();
    params_.push_back({name, t, group});
    return t;
  }

  Parameter<T>* find(const std::string& name) {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &params_[it->second];
  }
  const Parameter<T>* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &params_[it->second];
  }

  std::vector<Parameter<T>>& items() { return params_; }
  const std::vector<Parameter<T>>& items() const { return params_; }

  std::size_t total_values() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
  }

  void zero_grad() {
    for (auto& p : params_) p.value.zero_grad();
  }

  std::uint64_t init_seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::vector<Parameter<T>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct AdamConfig {
  double lr_from_scratch = 1e-4;
  double lr_fine_tuned = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-3;  // coupled L2: g += wd * w
};

// cosine decay from lr_max at step 0 to lr_min at total_steps, clamped after
inline double cosine_lr(int step, int total_steps, double lr_max, double lr_min = 0.0) {
  check(total_steps > 0, "cosine_lr: total_steps must be positive, got ", total_steps);
  check(step >= 0, "cosine_lr: step must be non-negative, got ", step);
  if (step >= total_steps) return lr_min;
  const double frac = static_cast<double>(step) / static_cast<double>(total_steps);
  return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(std::numbers::pi * frac));
}

template <typename T>
class Adam {
 public:
  Adam(ParamStore<T>& store, AdamConfig cfg = {}) : store_(&store), cfg_(cfg) {
    m_.resize(store.items().size());
    v_.resize(store.items().size());
    for (std::size_t i = 0; i < store.items().size(); ++i) {
      m_[i].assign(store.items()[i].value.size(), 0.0);
      v_[i].assign(store.items()[i].value.size(), 0.0);
    }
  }

  // lr_scale multiplies both group rates (cosine schedule passes its factor)
  void step(double lr_scale = 1.0) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    auto& items = store_->items();
    check(items.size() == m_.size(), "Adam: parameter count changed after creation");
    for (std::size_t pi = 0; pi < items.size(); ++pi) {
      auto& p = items[pi];
      const double lr = lr_scale * (p.group == ParamGroup::kFromScratch
                                        ? cfg_.lr_from_scratch
                                        : cfg_.lr_fine_tuned);
      auto w = p.value.mutable_values();
      const auto g = p.value.grad();
      check(g.size() == w.size(), "Adam: missing gradient for ", p.name);
      auto& m = m_[pi];
      auto& v = v_[pi];
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double grad = static_cast<double>(g[i]) +
                            cfg_.weight_decay * static_cast<double>(w[i]);
        m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * grad;
        v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * grad * grad;
        const double mh = m[i] / bc1;
        const double vh = v[i] / bc2;
        w[i] = static_cast<T>(w[i] - lr * mh / (std::sqrt(vh) + cfg_.eps));
      }
    }
  }

  int steps_taken() const { return t_; }

 private:
  ParamStore<T>* store_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  int t_ = 0;
};

}  // namespace egonav::nn
