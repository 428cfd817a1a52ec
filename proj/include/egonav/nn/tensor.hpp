#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "egonav/common/error.hpp"

namespace egonav::nn {

// skips value-initialization so fresh op outputs cost one pass, not two
template <typename T>
struct NoInitAlloc : std::allocator<T> {
  template <typename U>
  struct rebind {
    using other = NoInitAlloc<U>;
  };
  template <typename U>
  void construct(U* p) noexcept {
    ::new (static_cast<void*>(p)) U;
  }
  template <typename U, typename... Args>
  void construct(U* p, Args&&... args) {
    ::new (static_cast<void*>(p)) U(std::forward<Args>(args)...);
  }
};

template <typename T>
using Buf = std::vector<T, NoInitAlloc<T>>;

using Shape = std::vector<int>;

inline std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (int d : s) {
    check(d > 0, "shape dimensions must be positive");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

// thread-local autograd switch; evaluation wraps itself in NoGradGuard
inline bool& grad_mode() {
  thread_local bool enabled = true;
  return enabled;
}

struct NoGradGuard {
  bool prev;
  NoGradGuard() : prev(grad_mode()) { grad_mode() = false; }
  ~NoGradGuard() { grad_mode() = prev; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};

template <typename T>
struct Node {
  Shape shape;
  Buf<T> value;
  Buf<T> grad;  // allocated iff requires_grad
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node<T>>> parents;
  std::function<void(Node<T>&)> backward;  // scatter self.grad into parents
};

// reverse-mode autodiff handle; copies share the node
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  explicit Tensor(Shape shape, T fill = T(0)) : n_(std::make_shared<Node<T>>()) {
    n_->shape = std::move(shape);
    n_->value.assign(shape_numel(n_->shape), fill);
  }

  Tensor(Shape shape, Buf<T> data) : n_(std::make_shared<Node<T>>()) {
    n_->shape = std::move(shape);
    check(data.size() == shape_numel(n_->shape), "tensor data has ", data.size(),
          " values, shape ", shape_str(n_->shape), " wants ", shape_numel(n_->shape));
    n_->value = std::move(data);
  }

  Tensor(Shape shape, const std::vector<T>& data)
      : Tensor(std::move(shape), Buf<T>(data.begin(), data.end())) {}

  Tensor(Shape shape, std::initializer_list<T> data)
      : Tensor(std::move(shape), Buf<T>(data.begin(), data.end())) {}

  static Tensor scalar(T v) { return Tensor({1}, std::vector<T>{v}); }

  bool defined() const { return n_ != nullptr; }
  const Shape& shape() const { return n_->shape; }
  int dim(int i) const { return n_->shape.at(static_cast<std::size_t>(i)); }
  int rank() const { return static_cast<int>(n_->shape.size()); }
  std::size_t size() const { return n_->value.size(); }

  std::span<const T> values() const { return n_->value; }
  std::span<T> mutable_values() { return n_->value; }
  T item() const {
    check(size() == 1, "item() on tensor of shape ", shape_str(n_->shape));
    return n_->value[0];
  }

  bool requires_grad() const { return n_->requires_grad; }
  Tensor& set_requires_grad(bool v) {
    n_->requires_grad = v;
    if (v && n_->grad.size() != n_->value.size()) n_->grad.assign(n_->value.size(), T(0));
    return *this;
  }
  std::span<const T> grad() const { return n_->grad; }
  std::span<T> mutable_grad() { return n_->grad; }
  void zero_grad() {
    std::fill(n_->grad.begin(), n_->grad.end(), T(0));
  }

  std::shared_ptr<Node<T>> node() const { return n_; }

  // reverse pass from a scalar root
  void backward() const {
    check(defined() && size() == 1, "backward: root must be a defined scalar");
    check(n_->requires_grad, "backward: root does not require grad");
    std::vector<Node<T>*> order;
    std::unordered_set<Node<T>*> visited;
    struct Item {
      Node<T>* node;
      std::size_t next;
    };
    std::vector<Item> stack{{n_.get(), 0}};
    visited.insert(n_.get());
    while (!stack.empty()) {
      Item& top = stack.back();
      if (top.next < top.node->parents.size()) {
        Node<T>* p = top.node->parents[top.next++].get();
        if (p->requires_grad && visited.insert(p).second) stack.push_back({p, 0});
      } else {
        order.push_back(top.node);
        stack.pop_back();
      }
    }
    n_->grad.assign(1, T(1));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if ((*it)->backward) (*it)->backward(**it);
    }
  }

 private:
  explicit Tensor(std::shared_ptr<Node<T>> n) : n_(std::move(n)) {}
  std::shared_ptr<Node<T>> n_;

  template <typename U>
  friend Tensor<U> make_op(const char* name, Shape shape, Buf<U> value,
                           const std::vector<Tensor<U>>& parents,
                           std::function<void(Node<U>&)> backward);
};

template <typename T>
void debug_check_finite(const char* name, const Buf<T>& v) {
#ifndef NDEBUG
  for (T x : v) {
    if (!std::isfinite(static_cast<double>(x))) {
      fail(name, ": non-finite value in output");
    }
  }
#else
  (void)name;
  (void)v;
#endif
}

// every op funnels through here; the backward closure is dropped (along with
// the parent edges) when no parent needs gradients or grad mode is off
template <typename T>
Tensor<T> make_op(const char* name, Shape shape, Buf<T> value,
                  const std::vector<Tensor<T>>& parents,
                  std::function<void(Node<T>&)> backward) {
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  check(value.size() == shape_numel(node->shape), name, ": produced ", value.size(),
        " values for shape ", shape_str(node->shape));
  node->value = std::move(value);
  debug_check_finite(name, node->value);
  bool needs = false;
  if (grad_mode()) {
    for (const auto& p : parents) needs = needs || p.requires_grad();
  }
  if (needs) {
    node->requires_grad = true;
    node->grad.assign(node->value.size(), T(0));
    for (const auto& p : parents) {
      if (p.requires_grad()) node->parents.push_back(p.node());
    }
    node->backward = std::move(backward);
  }
  return Tensor<T>(std::move(node));
}

template <typename T>
void accumulate_grad(const std::shared_ptr<Node<T>>& node, const T* g, std::size_t n) {
  if (!node->requires_grad) return;
  for (std::size_t i = 0; i < n; ++i) node->grad[i] += g[i];
}

}  // namespace egonav::nn
