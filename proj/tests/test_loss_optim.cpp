#include <doctest.h>

#include <cmath>
#include <vector>

#include "egonav/nn/loss.hpp"
#include "egonav/nn/ops.hpp"
#include "egonav/nn/optim.hpp"
#include "support/gradcheck.hpp"

using namespace egonav;
using nn::Tensor;

namespace {

// reference cross-entropy with the same clamp and accumulation width
template <typename T>
T bce_reference(const Tensor<T>& probs, const Tensor<T>& targets, T eps) {
  T acc = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    T p = std::clamp(probs.values()[i], eps, T(1) - eps);
    acc += targets.values()[i] > T(0.5) ? -std::log(p) : -std::log(T(1) - p);
  }
  return acc / (T)probs.size();
}

template <typename T>
Tensor<T> random_targets(nn::Shape shape, std::uint64_t seed) {
  Rng rng(seed);
  Tensor<T> t(std::move(shape));
  for (auto& v : t.mutable_values()) v = rng.uniform(0.0, 1.0) < 0.4 ? T(1) : T(0);
  return t;
}

}  // namespace

TEST_CASE("focal loss with gamma 0 and unit weights is plain cross-entropy") {
  auto pd = gradcheck::leaf_in({16, 3}, 201, 0.02, 0.98);
  auto td = random_targets<double>({16, 3}, 202);
  auto loss = nn::focal_loss(pd, td, nn::bce_config<double>());
  CHECK(std::abs(loss.item() - bce_reference(pd, td, 1e-12)) < 1e-7);
  CHECK(loss.item() == doctest::Approx(bce_reference(pd, td, 1e-12)).epsilon(1e-12));

  Tensor<float> pf({16, 3});
  for (std::size_t i = 0; i < pf.size(); ++i) pf.mutable_values()[i] = (float)pd.values()[i];
  auto tf = random_targets<float>({16, 3}, 202);
  auto lf = nn::focal_loss(pf, tf, nn::bce_config<float>());
  CHECK(std::abs(lf.item() - bce_reference(pf, tf, 1e-6f)) < 1e-7);
}

TEST_CASE("focal loss matches the closed form on a single term") {
  // y=1, p=0.9, gamma=2, unit weight: -(0.1)^2 ln(0.9)
  nn::FocalConfig<double> cfg;
  cfg.gamma = 2.0;
  cfg.alpha = {1.0};
  auto loss = nn::focal_loss(Tensor<double>({1, 1}, {0.9}), Tensor<double>({1, 1}, {1.0}), cfg);
  CHECK(std::abs(loss.item() - 1.0536051565782630e-3) < 1e-9);

  // y=0 mirror: -(0.9)^2 ln(0.1)
  auto loss0 = nn::focal_loss(Tensor<double>({1, 1}, {0.9}), Tensor<double>({1, 1}, {0.0}), cfg);
  CHECK(loss0.item() == doctest::Approx(-0.81 * std::log(0.1)).epsilon(1e-12));
}

TEST_CASE("class weights scale per column") {
  nn::FocalConfig<double> cfg;
  cfg.gamma = 0.0;
  cfg.alpha = {2.0, 1.0, 0.5};
  Tensor<double> p({1, 3}, {0.5, 0.5, 0.5});
  Tensor<double> t({1, 3}, {1.0, 1.0, 1.0});
  const double l = std::log(2.0);
  auto loss = nn::focal_loss(p, t, cfg);
  CHECK(loss.item() == doctest::Approx((2.0 * l + l + 0.5 * l) / 3.0).epsilon(1e-12));
}

TEST_CASE("focal loss gradient passes finite differences") {
  auto targets = random_targets<double>({8, 3}, 203);
  for (double gamma : {0.0, 2.0}) {
    auto probs = gradcheck::leaf_in({8, 3}, 204 + (int)gamma, 0.05, 0.95);
    nn::FocalConfig<double> cfg;
    cfg.gamma = gamma;
    auto r = gradcheck::check({probs},
                              [&] { return nn::focal_loss(probs, targets, cfg); });
    CHECK(r.max_rel < 1e-5);
  }
}

TEST_CASE("focal loss validates its inputs") {
  nn::FocalConfig<double> cfg;
  CHECK_THROWS_WITH_AS(nn::focal_loss(Tensor<double>({1, 3}, {0.5, 1.5, 0.5}),
                                      Tensor<double>({1, 3}, {1, 0, 1}), cfg),
                       doctest::Contains("probability"), Error);
  CHECK_THROWS_WITH_AS(nn::focal_loss(Tensor<double>({1, 3}, {0.5, 0.5, 0.5}),
                                      Tensor<double>({1, 3}, {1, 0.3, 1}), cfg),
                       doctest::Contains("target"), Error);
  cfg.alpha = {1.0, 1.0};
  CHECK_THROWS_WITH_AS(nn::focal_loss(Tensor<double>({1, 3}, {0.5, 0.5, 0.5}),
                                      Tensor<double>({1, 3}, {1, 0, 1}), cfg),
                       doctest::Contains("class weights"), Error);
}

TEST_CASE("parameter store initializes deterministically by name") {
  nn::ParamStore<float> a(42), b(42);
  auto w1 = a.create("head.w", {3, 16}, nn::Init::kUniformFanIn);
  auto b1 = a.create("head.b", {3}, nn::Init::kZero);
  // reversed creation order must not change per-name draws
  b.create("head.b", {3}, nn::Init::kZero);
  auto w2 = b.create("head.w", {3, 16}, nn::Init::kUniformFanIn);
  for (std::size_t i = 0; i < w1.size(); ++i) CHECK(w1.values()[i] == w2.values()[i]);
  for (float v : b1.values()) CHECK(v == 0.0f);
  const float bound = std::sqrt(6.0f / 16.0f);  // fan_in 16
  for (float v : w1.values()) CHECK(std::abs(v) <= bound);

  CHECK(a.total_values() == 3 * 16 + 3);
  CHECK(a.find("head.w") != nullptr);
  CHECK(a.find("nope") == nullptr);
  CHECK_THROWS_WITH_AS(a.create("head.w", {1}, nn::Init::kZero),
                       doctest::Contains("duplicate"), Error);

  nn::ParamStore<float> c(43);
  auto w3 = c.create("head.w", {3, 16}, nn::Init::kUniformFanIn);
  bool same = true;
  for (std::size_t i = 0; i < w1.size(); ++i) same = same && w1.values()[i] == w3.values()[i];
  CHECK(!same);  // different seed, different draws
}

TEST_CASE("adam step matches a hand computation") {
  nn::AdamConfig cfg;
  cfg.lr_from_scratch = 0.1;
  cfg.beta1 = 0.9;
  cfg.beta2 = 0.999;
  cfg.eps = 1e-8;
  cfg.weight_decay = 0.01;

  nn::ParamStore<double> store(1);
  auto w = store.create("w", {2}, nn::Init::kZero);
  w.mutable_values()[0] = 1.0;
  w.mutable_values()[1] = -2.0;
  const std::vector<double> w0 = {1.0, -2.0};

  nn::Adam<double> adam(store, cfg);
  Tensor<double> c({2}, {2.0, 4.0});
  store.zero_grad();
  auto loss = nn::mean_all(nn::mul(w, c));  // dw = c / 2
  loss.backward();
  adam.step();
  CHECK(adam.steps_taken() == 1);

  for (int i = 0; i < 2; ++i) {
    const double g = c.values()[i] / 2.0 + cfg.weight_decay * w0[i];
    const double m = (1 - cfg.beta1) * g;
    const double v = (1 - cfg.beta2) * g * g;
    const double mh = m / (1 - cfg.beta1);
    const double vh = v / (1 - cfg.beta2);
    const double want = w0[i] - cfg.lr_from_scratch * mh / (std::sqrt(vh) + cfg.eps);
    CHECK(w.values()[i] == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("fine-tuned group uses its own learning rate and zero scale freezes") {
  nn::AdamConfig cfg;
  cfg.lr_from_scratch = 0.1;
  cfg.lr_fine_tuned = 0.0;
  cfg.weight_decay = 0.0;

  nn::ParamStore<double> store(1);
  auto ws = store.create("s", {1}, nn::Init::kZero, nn::ParamGroup::kFromScratch);
  auto wf = store.create("f", {1}, nn::Init::kZero, nn::ParamGroup::kFineTuned);
  ws.mutable_values()[0] = 1.0;
  wf.mutable_values()[0] = 1.0;

  nn::Adam<double> adam(store, cfg);
  store.zero_grad();
  nn::add(ws, wf).backward();
  adam.step();
  CHECK(ws.values()[0] != 1.0);
  CHECK(wf.values()[0] == 1.0);  // lr 0 leaves it alone

  const double after = ws.values()[0];
  store.zero_grad();
  nn::add(ws, wf).backward();
  adam.step(0.0);  // scale 0 freezes everything
  CHECK(ws.values()[0] == after);
}

TEST_CASE("cosine schedule hits its endpoints") {
  CHECK(nn::cosine_lr(0, 100, 3e-4) == doctest::Approx(3e-4));
  CHECK(nn::cosine_lr(100, 100, 3e-4) == doctest::Approx(0.0));
  CHECK(nn::cosine_lr(150, 100, 3e-4) == doctest::Approx(0.0));  // clamped past the end
  CHECK(nn::cosine_lr(50, 100, 3e-4, 1e-5) ==
        doctest::Approx((3e-4 + 1e-5) / 2).epsilon(1e-12));
  CHECK(nn::cosine_lr(0, 100, 3e-4, 1e-5) == doctest::Approx(3e-4));
  // monotone on the way down
  double prev = nn::cosine_lr(0, 50, 1.0);
  for (int s = 1; s <= 50; ++s) {
    double cur = nn::cosine_lr(s, 50, 1.0);
    CHECK(cur <= prev);
    prev = cur;
  }
  CHECK_THROWS_WITH_AS(nn::cosine_lr(0, 0, 1.0), doctest::Contains("total_steps"), Error);
  CHECK_THROWS_WITH_AS(nn::cosine_lr(-1, 10, 1.0), doctest::Contains("non-negative"), Error);
}
