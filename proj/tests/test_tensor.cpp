#include <doctest.h>

#include <vector>

#include "egonav/nn/ops.hpp"
#include "egonav/nn/tensor.hpp"

using namespace egonav;
using nn::Tensor;

TEST_CASE("tensor construction and accessors") {
  Tensor<float> a({2, 3}, 1.5f);
  CHECK(a.size() == 6);
  CHECK(a.dim(0) == 2);
  CHECK(a.dim(1) == 3);
  for (float v : a.values()) CHECK(v == 1.5f);

  Tensor<float> b({3}, {1.0f, 2.0f, 3.0f});
  CHECK(b.values()[2] == 3.0f);

  Tensor<float> c({2, 2}, std::vector<float>{1, 2, 3, 4});
  CHECK(c.values()[3] == 4.0f);

  auto s = Tensor<double>::scalar(7.0);
  CHECK(s.item() == 7.0);
  CHECK_THROWS_WITH_AS(c.item(), doctest::Contains("item()"), Error);

  CHECK_THROWS_WITH_AS(Tensor<float>({2, 0}, 0.0f),
                       doctest::Contains("positive"), Error);
  CHECK_THROWS_WITH_AS(Tensor<float>({2, 2}, std::vector<float>{1, 2, 3}),
                       doctest::Contains("tensor data"), Error);

  Tensor<float> undef;
  CHECK(!undef.defined());
}

TEST_CASE("backward accumulates through a small graph") {
  // f = mean((a+b) * a); df/da = (2a+b)/n, df/db = a/n
  Tensor<double> a({2, 2}, {1, 2, 3, 4});
  Tensor<double> b({2, 2}, {5, 6, 7, 8});
  a.set_requires_grad(true);
  b.set_requires_grad(true);

  auto f = nn::mean_all(nn::mul(nn::add(a, b), a));
  CHECK(f.item() == doctest::Approx((6 + 16 + 30 + 48) / 4.0));
  f.backward();
  for (int i = 0; i < 4; ++i) {
    CHECK(a.grad()[i] == doctest::Approx((2 * a.values()[i] + b.values()[i]) / 4.0));
    CHECK(b.grad()[i] == doctest::Approx(a.values()[i] / 4.0));
  }

  // a second backward without zeroing doubles the gradients
  auto f2 = nn::mean_all(nn::mul(nn::add(a, b), a));
  f2.backward();
  CHECK(a.grad()[0] == doctest::Approx(2 * (2 * a.values()[0] + b.values()[0]) / 4.0));
  a.zero_grad();
  CHECK(a.grad()[0] == 0.0);
}

TEST_CASE("a leaf used twice collects both contributions") {
  Tensor<double> a({3}, {1, 2, 3});
  a.set_requires_grad(true);
  auto f = nn::mean_all(nn::mul(a, a));  // d/da mean(a^2) = 2a/3
  f.backward();
  for (int i = 0; i < 3; ++i) CHECK(a.grad()[i] == doctest::Approx(2 * a.values()[i] / 3));
}

TEST_CASE("backward rejects bad roots") {
  Tensor<double> a({2}, {1, 2});
  CHECK_THROWS_WITH_AS(a.backward(), doctest::Contains("scalar"), Error);

  auto s = Tensor<double>::scalar(1.0);
  CHECK_THROWS_WITH_AS(s.backward(), doctest::Contains("does not require grad"), Error);
}

TEST_CASE("NoGradGuard detaches results from the graph") {
  Tensor<double> a({2}, {1, 2});
  a.set_requires_grad(true);
  {
    nn::NoGradGuard ng;
    auto y = nn::scale(a, 2.0);
    CHECK(!y.requires_grad());
    CHECK(y.values()[1] == 4.0);
  }
  auto y = nn::scale(a, 2.0);
  CHECK(y.requires_grad());
}

TEST_CASE("ops propagate requires_grad only when a parent needs it") {
  Tensor<double> a({2}, {1, 2});
  Tensor<double> b({2}, {3, 4});
  CHECK(!nn::add(a, b).requires_grad());
  b.set_requires_grad(true);
  CHECK(nn::add(a, b).requires_grad());
}

TEST_CASE("tensors share the underlying node on copy") {
  Tensor<double> a({2}, {1, 2});
  Tensor<double> view = a;
  view.mutable_values()[0] = 9;
  CHECK(a.values()[0] == 9.0);
}
