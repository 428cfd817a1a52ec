#include <doctest.h>

#include <cmath>
#include <vector>

#include "egonav/models/models.hpp"
#include "egonav/nn/loss.hpp"
#include "support/gradcheck.hpp"

using namespace egonav;
using models::Architecture;
using models::ModelConfig;

namespace {

// small enough for exhaustive finite differences
ModelConfig tiny_config(Architecture a) {
  ModelConfig cfg;
  cfg.architecture = a;
  cfg.frame_size = 8;
  cfg.context_length = 2;
  cfg.embedding_dim = 8;
  cfg.intent_dim = 4;
  cfg.lstm_hidden = 6;
  cfg.base_channels = 2;
  cfg.mlp_hidden = 8;
  cfg.convlstm_channels = 4;
  cfg.convlstm_pool = 2;
  return cfg;
}

template <typename T>
models::Batch<T> random_batch(const ModelConfig& cfg, int n, std::uint64_t seed) {
  Rng rng(seed);
  const int steps = cfg.context_length + 1;
  models::Batch<T> b;
  b.batch = n;
  b.steps = steps;
  b.current = nn::Tensor<T>({n, cfg.frame_channels, cfg.frame_size, cfg.frame_size});
  b.sequence =
      nn::Tensor<T>({steps * n, cfg.frame_channels, cfg.frame_size, cfg.frame_size});
  b.intent = nn::Tensor<T>({n, intent::kIntentDim});
  b.intent_steps = nn::Tensor<T>({steps * n, intent::kIntentDim});
  b.targets = nn::Tensor<T>({n, kNumClasses});
  for (auto& v : b.sequence.mutable_values()) v = (T)rng.uniform(0.0, 1.0);
  // current mirrors the last sequence step so single-frame and sequence
  // architectures see consistent data
  const std::size_t px =
      (std::size_t)cfg.frame_channels * cfg.frame_size * cfg.frame_size;
  for (int i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < px; ++p) {
      b.current.mutable_values()[i * px + p] =
          b.sequence.values()[((steps - 1) * n + i) * px + p];
    }
  }
  for (auto& v : b.intent.mutable_values()) v = (T)rng.uniform(0.0, 1.0);
  for (auto& v : b.intent_steps.mutable_values()) v = (T)rng.uniform(0.0, 1.0);
  for (auto& v : b.targets.mutable_values()) v = rng.bernoulli(0.3) ? T(1) : T(0);
  return b;
}

}  // namespace

TEST_CASE("parameter totals match the closed-form counts") {
  // hand-derived for the default dims (frame 128, E=64, D=16, H=64, b=4,
  // mlp 128, clstm 8 @ pool 4): encoder 40+296+1168+4640+2112 = 8256
  const std::size_t enc = 8256, intent_embed = 16 * 13 + 16;
  ModelConfig cfg;

  cfg.architecture = Architecture::kCnn;
  CHECK(models::expected_param_count(cfg) == enc + 3 * 64 + 3);

  cfg.architecture = Architecture::kCnnIntent;
  CHECK(models::expected_param_count(cfg) ==
        enc + intent_embed + (128 * 80 + 128) + (3 * 128 + 3));

  cfg.architecture = Architecture::kConvLstm;
  CHECK(models::expected_param_count(cfg) == (288 + 2304 + 32) + (3 * 8 + 3));

  cfg.architecture = Architecture::kConvLstmIntent;
  CHECK(models::expected_param_count(cfg) ==
        (288 + 2304 + 32) + (3 * 8 + 3) + intent_embed + 2 * (16 + 1));

  cfg.architecture = Architecture::kCnnLstmIntent;
  const std::size_t lstm1 = 4 * 64 * 80 + 4 * 64 * 64 + 4 * 64;
  const std::size_t lstm2 = 4 * 64 * 64 + 4 * 64 * 64 + 4 * 64;
  CHECK(models::expected_param_count(cfg) ==
        enc + intent_embed + lstm1 + lstm2 + 3 * 64 + 3);

  // and the stores agree, at default and tiny dims
  for (auto a : models::kAllArchitectures) {
    ModelConfig full;
    full.architecture = a;
    CHECK(models::build_model<float>(full, 1)->params().total_values() ==
          models::expected_param_count(full));
    auto tiny = tiny_config(a);
    CHECK(models::build_model<float>(tiny, 1)->params().total_values() ==
          models::expected_param_count(tiny));
  }
}

TEST_CASE("forward mac counts order the architectures as expected") {
  ModelConfig cfg;
  auto macs = [&](Architecture a) {
    cfg.architecture = a;
    return models::forward_mac_count(cfg);
  };
  // single-frame models are far cheaper than recurrent ones; the pooled
  // convlstm outweighs the shared-encoder lstm stack
  CHECK(macs(Architecture::kCnn) < macs(Architecture::kCnnIntent));
  CHECK(macs(Architecture::kCnnIntent) < macs(Architecture::kCnnLstmIntent));
  CHECK(macs(Architecture::kCnnLstmIntent) < macs(Architecture::kConvLstm));
  CHECK(macs(Architecture::kConvLstm) < macs(Architecture::kConvLstmIntent));
  // cnn mac count by hand: conv taps + embedding + head
  const std::size_t conv = 64ull * 64 * 4 * 1 * 9 + 32ull * 32 * 8 * 4 * 9 +
                           16ull * 16 * 16 * 8 * 9 + 8ull * 8 * 32 * 16 * 9;
  CHECK(macs(Architecture::kCnn) == conv + 64 * 32 + 3 * 64);
}

TEST_CASE("all architectures produce probabilities and respect batch needs") {
  for (auto a : models::kAllArchitectures) {
    auto cfg = tiny_config(a);
    auto model = models::build_model<float>(cfg, 7);
    auto batch = random_batch<float>(cfg, 3, 70 + (int)a);
    auto probs = model->forward(batch);
    REQUIRE(probs.shape() == nn::Shape{3, kNumClasses});
    for (float p : probs.values()) {
      CHECK(p > 0.0f);
      CHECK(p < 1.0f);
    }
    const auto needs = model->needs();
    CHECK(needs.sequence == models::architecture_uses_sequence(a));
    if (a == Architecture::kCnnLstmIntent) {
      CHECK(needs.intent_steps);
      CHECK(!needs.intent);
    } else {
      CHECK(needs.intent == models::architecture_uses_intent(a));
    }
  }
}

TEST_CASE("zeroed parameters give exactly 0.5 everywhere") {
  for (auto a : models::kAllArchitectures) {
    auto cfg = tiny_config(a);
    auto model = models::build_model<float>(cfg, 7);
    for (auto& p : model->params().items()) {
      for (auto& v : p.value.mutable_values()) v = 0.0f;
    }
    auto probs = model->forward(random_batch<float>(cfg, 2, 71));
    for (float p : probs.values()) CHECK(p == 0.5f);
  }
}

TEST_CASE("film starts as the identity so intent conditioning is a superset") {
  auto cfg = tiny_config(Architecture::kConvLstm);
  auto plain = models::build_model<float>(cfg, 5);
  auto cfg_i = cfg;
  cfg_i.architecture = Architecture::kConvLstmIntent;
  auto conditioned = models::build_model<float>(cfg_i, 5);

  // shared parameter names draw from per-name streams, so the recurrent cell
  // and head coincide; the film projections start at zero
  auto batch = random_batch<float>(cfg_i, 3, 72);
  auto p0 = plain->forward(batch);
  auto p1 = conditioned->forward(batch);
  REQUIRE(p0.size() == p1.size());
  for (std::size_t i = 0; i < p0.size(); ++i) CHECK(p0.values()[i] == p1.values()[i]);
}

TEST_CASE("same seed builds identical models, different seeds do not") {
  auto cfg = tiny_config(Architecture::kCnnLstmIntent);
  auto a = models::build_model<float>(cfg, 9);
  auto b = models::build_model<float>(cfg, 9);
  auto c = models::build_model<float>(cfg, 10);
  bool same_ab = true, same_ac = true;
  for (std::size_t i = 0; i < a->params().items().size(); ++i) {
    const auto va = a->params().items()[i].value.values();
    const auto vb = b->params().items()[i].value.values();
    const auto vc = c->params().items()[i].value.values();
    for (std::size_t j = 0; j < va.size(); ++j) {
      same_ab = same_ab && va[j] == vb[j];
      same_ac = same_ac && va[j] == vc[j];
    }
  }
  CHECK(same_ab);
  CHECK(!same_ac);
}

TEST_CASE("sequence models reject a batch with the wrong step count") {
  auto cfg = tiny_config(Architecture::kCnnLstmIntent);
  auto model = models::build_model<float>(cfg, 3);
  auto batch = random_batch<float>(cfg, 2, 73);
  batch.steps = cfg.context_length;  // one short
  CHECK_THROWS_WITH_AS(model->forward(batch), doctest::Contains("model expects"),
                       Error);
}

TEST_CASE("architecture names round trip") {
  for (auto a : models::kAllArchitectures) {
    auto name = models::architecture_name(a);
    auto back = models::architecture_from_name(name);
    REQUIRE(back.has_value());
    CHECK(*back == a);
  }
  CHECK(!models::architecture_from_name("resnet50").has_value());
  CHECK(models::architecture_from_name("cnn_lstm_intent") ==
        Architecture::kCnnLstmIntent);
}

TEST_CASE("model config json round trips and validates") {
  ModelConfig cfg = tiny_config(Architecture::kConvLstmIntent);
  auto j = models::model_config_to_json(cfg);
  CHECK(models::model_config_from_json(j) == cfg);

  auto bad = j;
  bad["architecture"] = "mlp";
  CHECK_THROWS_WITH_AS((void)models::model_config_from_json(bad),
                       doctest::Contains("unknown architecture"), Error);
  bad = j;
  bad["convlstm_pool"] = 3;  // does not divide 8
  CHECK_THROWS_WITH_AS((void)models::model_config_from_json(bad),
                       doctest::Contains("convlstm_pool"), Error);
  bad = j;
  bad["frame_size"] = 7;
  CHECK_THROWS_AS((void)models::model_config_from_json(bad), Error);
}

TEST_CASE("tiny cnn model gradient passes finite differences") {
  // full-architecture double-precision checks run in the acceptance binary;
  // this one catches wiring regressions quickly
  auto cfg = tiny_config(Architecture::kCnn);
  auto model = models::build_model<double>(cfg, 21);
  auto batch = random_batch<double>(cfg, 2, 74);

  std::vector<nn::Tensor<double>> leaves;
  for (auto& p : model->params().items()) leaves.push_back(p.value);
  auto r = gradcheck::check(leaves, [&] {
    return nn::focal_loss(model->forward(batch), batch.targets,
                          nn::FocalConfig<double>{});
  });
  CHECK(r.max_rel < 1e-5);
  CHECK(r.checked == models::expected_param_count(cfg));
}
