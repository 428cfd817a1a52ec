#include <doctest.h>

#include <cmath>
#include <vector>

#include "egonav/nn/ops.hpp"
#include "egonav/nn/rnn.hpp"
#include "support/gradcheck.hpp"

using namespace egonav;
using nn::Tensor;
using gradcheck::leaf;
using gradcheck::scalarize;

namespace {

constexpr double kTol = 1e-5;

// plain quadruple-loop convolution, no im2col
Tensor<double> conv_reference(const Tensor<double>& x, const Tensor<double>& w,
                              const Tensor<double>& b, int stride, int pad) {
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const int f = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const int ho = (h + 2 * pad - kh) / stride + 1;
  const int wo = (wd + 2 * pad - kw) / stride + 1;
  Tensor<double> out({n, f, ho, wo});
  auto ov = out.mutable_values();
  const auto xv = x.values();
  const auto wv = w.values();
  std::size_t oi = 0;
  for (int i = 0; i < n; ++i) {
    for (int ff = 0; ff < f; ++ff) {
      for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox, ++oi) {
          double acc = b.defined() ? b.values()[ff] : 0.0;
          for (int cc = 0; cc < c; ++cc) {
            for (int ky = 0; ky < kh; ++ky) {
              for (int kx = 0; kx < kw; ++kx) {
                const int y = oy * stride - pad + ky;
                const int xx = ox * stride - pad + kx;
                if (y < 0 || y >= h || xx < 0 || xx >= wd) continue;
                acc += wv[((std::size_t)(ff * c + cc) * kh + ky) * kw + kx] *
                       xv[((std::size_t)(i * c + cc) * h + y) * wd + xx];
              }
            }
          }
          ov[oi] = acc;
        }
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("elementwise ops match closed forms and pass gradcheck") {
  auto a = leaf({3, 5}, 11);
  auto b = leaf({3, 5}, 12);

  auto sum = nn::add(a, b);
  auto prod = nn::mul(a, b);
  for (std::size_t i = 0; i < sum.size(); ++i) {
    CHECK(sum.values()[i] == doctest::Approx(a.values()[i] + b.values()[i]));
    CHECK(prod.values()[i] == doctest::Approx(a.values()[i] * b.values()[i]));
  }

  auto r = gradcheck::check({a, b}, [&] { return scalarize(nn::add(a, b), 1); });
  CHECK(r.max_rel < kTol);
  r = gradcheck::check({a, b}, [&] { return scalarize(nn::mul(a, b), 2); });
  CHECK(r.max_rel < kTol);
  r = gradcheck::check({a}, [&] { return scalarize(nn::scale(a, -1.7), 3); });
  CHECK(r.max_rel < kTol);
  r = gradcheck::check({a}, [&] { return scalarize(nn::sigmoid(a), 4); });
  CHECK(r.max_rel < kTol);
  r = gradcheck::check({a}, [&] { return scalarize(nn::tanh_act(a), 5); });
  CHECK(r.max_rel < kTol);

  // keep relu inputs away from the kink so finite differences stay two-sided
  auto ar = leaf({3, 5}, 13, 0.05);
  r = gradcheck::check({ar}, [&] { return scalarize(nn::relu(ar), 6); });
  CHECK(r.max_rel < kTol);

  CHECK_THROWS_WITH_AS(nn::add(a, leaf({5, 3}, 14)),
                       doctest::Contains("add: shapes differ"), Error);
}

TEST_CASE("linear matches manual matmul and passes gradcheck") {
  auto x = leaf({4, 6}, 21);
  auto w = leaf({3, 6}, 22);
  auto b = leaf({3}, 23);

  auto y = nn::linear(x, w, b);
  REQUIRE(y.shape() == nn::Shape{4, 3});
  for (int i = 0; i < 4; ++i) {
    for (int o = 0; o < 3; ++o) {
      double acc = b.values()[o];
      for (int k = 0; k < 6; ++k) acc += x.values()[i * 6 + k] * w.values()[o * 6 + k];
      CHECK(y.values()[i * 3 + o] == doctest::Approx(acc).epsilon(1e-12));
    }
  }

  auto r = gradcheck::check({x, w, b}, [&] { return scalarize(nn::linear(x, w, b), 7); });
  CHECK(r.max_rel < kTol);
  r = gradcheck::check({x, w}, [&] { return scalarize(nn::linear(x, w), 8); });
  CHECK(r.max_rel < kTol);
}

TEST_CASE("conv2d matches the naive reference") {
  for (int stride : {1, 2}) {
    for (int pad : {0, 1}) {
      auto x = leaf({2, 3, 9, 7}, 31 + stride * 10 + pad);
      auto w = leaf({4, 3, 3, 3}, 32);
      auto b = leaf({4}, 33);
      auto fast = nn::conv2d(x, w, b, stride, pad);
      auto ref = conv_reference(x, w, b, stride, pad);
      REQUIRE(fast.shape() == ref.shape());
      for (std::size_t i = 0; i < fast.size(); ++i) {
        CHECK(fast.values()[i] == doctest::Approx(ref.values()[i]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("conv2d passes gradcheck for both strides") {
  for (int stride : {1, 2}) {
    auto x = leaf({2, 2, 6, 6}, 41 + stride);
    auto w = leaf({3, 2, 3, 3}, 42);
    auto b = leaf({3}, 43);
    auto r = gradcheck::check(
        {x, w, b}, [&] { return scalarize(nn::conv2d(x, w, b, stride, 1), 9); });
    CHECK(r.max_rel < kTol);
    r = gradcheck::check({x, w},
                         [&] { return scalarize(nn::conv2d(x, w, {}, stride, 0), 10); });
    CHECK(r.max_rel < kTol);
  }
  CHECK_THROWS_WITH_AS(nn::conv2d(leaf({1, 2, 4, 4}, 44), leaf({3, 5, 3, 3}, 45)),
                       doctest::Contains("conv2d: weight expects"), Error);
}

TEST_CASE("maxpool2d picks window maxima and routes gradients to them") {
  Tensor<double> x({1, 1, 4, 4}, {1, 5, 2, 0,
                                  3, 4, 1, 1,
                                  0, 2, 9, 8,
                                  1, 1, 7, 6});
  x.set_requires_grad(true);
  auto y = nn::maxpool2d(x, 2);
  REQUIRE(y.shape() == nn::Shape{1, 1, 2, 2});
  CHECK(y.values()[0] == 5);
  CHECK(y.values()[1] == 2);
  CHECK(y.values()[2] == 2);
  CHECK(y.values()[3] == 9);

  auto loss = nn::mean_all(y);
  loss.backward();
  CHECK(x.grad()[1] == doctest::Approx(0.25));   // the 5
  CHECK(x.grad()[10] == doctest::Approx(0.25));  // the 9
  CHECK(x.grad()[0] == 0.0);

  auto xl = leaf({2, 3, 6, 6}, 51);
  auto r = gradcheck::check({xl}, [&] { return scalarize(nn::maxpool2d(xl, 2), 11); });
  CHECK(r.max_rel < kTol);
  r = gradcheck::check({xl}, [&] { return scalarize(nn::maxpool2d(xl, 3, 1), 12); });
  CHECK(r.max_rel < kTol);
}

TEST_CASE("global_avg_pool averages planes and passes gradcheck") {
  auto x = leaf({2, 3, 4, 5}, 61);
  auto y = nn::global_avg_pool(x);
  REQUIRE(y.shape() == nn::Shape{2, 3});
  double acc = 0;
  for (int p = 0; p < 20; ++p) acc += x.values()[p];
  CHECK(y.values()[0] == doctest::Approx(acc / 20));

  auto r = gradcheck::check({x}, [&] { return scalarize(nn::global_avg_pool(x), 13); });
  CHECK(r.max_rel < kTol);
}

TEST_CASE("concat and slice are inverse and pass gradcheck") {
  auto a = leaf({2, 3}, 71);
  auto b = leaf({2, 2}, 72);
  auto cat = nn::concat<double>({a, b}, 1);
  REQUIRE(cat.shape() == nn::Shape{2, 5});
  auto back_a = nn::slice(cat, 1, 0, 3);
  auto back_b = nn::slice(cat, 1, 3, 2);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(back_a.values()[i] == a.values()[i]);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(back_b.values()[i] == b.values()[i]);

  auto r = gradcheck::check(
      {a, b}, [&] { return scalarize(nn::concat<double>({a, b}, 1), 14); });
  CHECK(r.max_rel < kTol);
  r = gradcheck::check({a}, [&] { return scalarize(nn::slice(a, 0, 1, 1), 15); });
  CHECK(r.max_rel < kTol);

  CHECK_THROWS_WITH_AS(nn::slice(a, 1, 2, 5), doctest::Contains("slice"), Error);
  CHECK_THROWS_WITH_AS(nn::concat<double>({a, leaf({3, 3}, 73)}, 1),
                       doctest::Contains("concat"), Error);
}

TEST_CASE("film applies (1+s)*x + t per channel and passes gradcheck") {
  auto x = leaf({2, 3, 2, 2}, 81);
  auto s = leaf({2, 3}, 82);
  auto t = leaf({2, 3}, 83);
  auto y = nn::film(x, s, t);
  for (int i = 0; i < 2; ++i) {
    for (int c = 0; c < 3; ++c) {
      for (int p = 0; p < 4; ++p) {
        const std::size_t xi = ((std::size_t)i * 3 + c) * 4 + p;
        const double want =
            (1.0 + s.values()[i * 3 + c]) * x.values()[xi] + t.values()[i * 3 + c];
        CHECK(y.values()[xi] == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }

  // zero scale and shift leave the input untouched
  Tensor<double> zs({2, 3}, 0.0), zt({2, 3}, 0.0);
  auto id = nn::film(x, zs, zt);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(id.values()[i] == x.values()[i]);

  auto r = gradcheck::check({x, s, t}, [&] { return scalarize(nn::film(x, s, t), 16); });
  CHECK(r.max_rel < kTol);
}

TEST_CASE("lstm_cell and convlstm_cell pass gradcheck") {
  const int hidden = 4;
  auto x = leaf({3, 5}, 91);
  auto h = leaf({3, hidden}, 92);
  auto c = leaf({3, hidden}, 93);
  nn::LstmParams<double> p{leaf({4 * hidden, 5}, 94), leaf({4 * hidden, hidden}, 95),
                           leaf({4 * hidden}, 96)};
  auto r = gradcheck::check({x, h, c, p.w_ih, p.w_hh, p.b}, [&] {
    auto [hn, cn] = nn::lstm_cell(x, h, c, p);
    return nn::add(scalarize(hn, 17), scalarize(cn, 18));
  });
  CHECK(r.max_rel < kTol);

  const int ch = 2;
  auto xc = leaf({2, 3, 4, 4}, 101);
  auto hc = leaf({2, ch, 4, 4}, 102);
  auto cc = leaf({2, ch, 4, 4}, 103);
  nn::ConvLstmParams<double> cp{leaf({4 * ch, 3, 3, 3}, 104),
                                leaf({4 * ch, ch, 3, 3}, 105), leaf({4 * ch}, 106)};
  r = gradcheck::check({xc, hc, cc, cp.w_x, cp.w_h, cp.b}, [&] {
    auto [hn, cn] = nn::convlstm_cell(xc, hc, cc, cp);
    return nn::add(scalarize(hn, 19), scalarize(cn, 20));
  });
  CHECK(r.max_rel < kTol);
}
