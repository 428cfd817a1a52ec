#pragma once

#include <memory>
#include <string>
#include <vector>

#include "egonav/core/label.hpp"
#include "egonav/intent/intent.hpp"
#include "egonav/models/config.hpp"
#include "egonav/nn/optim.hpp"
#include "egonav/nn/rnn.hpp"

namespace egonav::models {

// assembled model inputs; sequence tensors are timestep-major with the oldest
// context frame first and the current frame as the final step
template <typename T>
struct Batch {
  nn::Tensor<T> current;       // [N,C,H,W]
  nn::Tensor<T> sequence;      // [S*N,C,H,W] with S = context_length + 1
  nn::Tensor<T> intent;        // [N,13], zeros when no route applies
  nn::Tensor<T> intent_steps;  // [S*N,13]
  nn::Tensor<T> targets;       // [N,3]
  int batch = 0;
  int steps = 0;
};

struct BatchNeeds {
  bool sequence = false;
  bool intent = false;
  bool intent_steps = false;
};

template <typename T>
class Model {
 public:
  Model(const ModelConfig& cfg, std::uint64_t init_seed)
      : cfg_(cfg), params_(init_seed) {
    cfg.validate();
  }
  virtual ~Model() = default;

  // per-class probabilities [N,3]
  virtual nn::Tensor<T> forward(const Batch<T>& batch) = 0;
  virtual BatchNeeds needs() const = 0;

  const ModelConfig& config() const { return cfg_; }
  nn::ParamStore<T>& params() { return params_; }
  const nn::ParamStore<T>& params() const { return params_; }

 protected:
  ModelConfig cfg_;
  nn::ParamStore<T> params_;
};

namespace detail {

template <typename T>
struct CnnEncoder {
  std::vector<nn::Tensor<T>> w, b;
  nn::Tensor<T> embed_w, embed_b;

  static CnnEncoder create(nn::ParamStore<T>& ps, const ModelConfig& cfg) {
    CnnEncoder e;
    int cin = cfg.frame_channels;
    for (int i = 0; i < 4; ++i) {
      const int cout = cfg.base_channels << i;
      const std::string stem = "encoder.conv" + std::to_string(i + 1);
      e.w.push_back(ps.create(stem + ".w", {cout, cin, 3, 3}, nn::Init::kUniformFanIn));
      e.b.push_back(ps.create(stem + ".b", {cout}, nn::Init::kZero));
      cin = cout;
    }
    e.embed_w =
        ps.create("encoder.embed.w", {cfg.embedding_dim, cin}, nn::Init::kUniformFanIn);
    e.embed_b = ps.create("encoder.embed.b", {cfg.embedding_dim}, nn::Init::kZero);
    return e;
  }

  // [M,C,H,W] -> [M,E]
  nn::Tensor<T> encode(nn::Tensor<T> x) const {
    for (std::size_t i = 0; i < w.size(); ++i) {
      x = nn::relu(nn::conv2d(x, w[i], b[i], 2, 1));
    }
    return nn::relu(nn::linear(nn::global_avg_pool(x), embed_w, embed_b));
  }
};

template <typename T>
struct IntentEmbed {
  nn::Tensor<T> w, b;

  static IntentEmbed create(nn::ParamStore<T>& ps, const ModelConfig& cfg) {
    IntentEmbed e;
    e.w = ps.create("intent.embed.w", {cfg.intent_dim, intent::kIntentDim},
                    nn::Init::kUniformFanIn);
    e.b = ps.create("intent.embed.b", {cfg.intent_dim}, nn::Init::kZero);
    return e;
  }

  nn::Tensor<T> embed(const nn::Tensor<T>& features) const {
    return nn::relu(nn::linear(features, w, b));
  }
};

template <typename T>
nn::Tensor<T> head_probs(const nn::Tensor<T>& z, const nn::Tensor<T>& w,
                         const nn::Tensor<T>& b) {
  return nn::sigmoid(nn::linear(z, w, b));
}

inline void check_batch(const ModelConfig& cfg, int batch, int steps, bool sequence) {
  check(batch > 0, "forward: empty batch");
  if (sequence) {
    check(steps == cfg.context_length + 1, "forward: batch has ", steps,
          " steps, model expects ", cfg.context_length + 1);
  }
}

}  // namespace detail

template <typename T>
class CnnModel final : public Model<T> {
 public:
  CnnModel(const ModelConfig& cfg, std::uint64_t seed) : Model<T>(cfg, seed) {
    enc_ = detail::CnnEncoder<T>::create(this->params_, cfg);
    head_w_ = this->params_.create("head.w", {kNumClasses, cfg.embedding_dim},
                                   nn::Init::kUniformFanIn);
    head_b_ = this->params_.create("head.b", {kNumClasses}, nn::Init::kZero);
  }

  nn::Tensor<T> forward(const Batch<T>& batch) override {
    detail::check_batch(this->cfg_, batch.batch, batch.steps, false);
    return detail::head_probs(enc_.encode(batch.current), head_w_, head_b_);
  }

  BatchNeeds needs() const override { return {}; }

 private:
  detail::CnnEncoder<T> enc_;
  nn::Tensor<T> head_w_, head_b_;
};

template <typename T>
class CnnIntentModel final : public Model<T> {
 public:
  CnnIntentModel(const ModelConfig& cfg, std::uint64_t seed) : Model<T>(cfg, seed) {
    enc_ = detail::CnnEncoder<T>::create(this->params_, cfg);
    intent_ = detail::IntentEmbed<T>::create(this->params_, cfg);
    fc1_w_ = this->params_.create(
        "mlp.fc1.w", {cfg.mlp_hidden, cfg.embedding_dim + cfg.intent_dim},
        nn::Init::kUniformFanIn);
    fc1_b_ = this->params_.create("mlp.fc1.b", {cfg.mlp_hidden}, nn::Init::kZero);
    fc2_w_ = this->params_.create("mlp.fc2.w", {kNumClasses, cfg.mlp_hidden},
                                  nn::Init::kUniformFanIn);
    fc2_b_ = this->params_.create("mlp.fc2.b", {kNumClasses}, nn::Init::kZero);
  }

  nn::Tensor<T> forward(const Batch<T>& batch) override {
    detail::check_batch(this->cfg_, batch.batch, batch.steps, false);
    auto z = nn::concat<T>({enc_.encode(batch.current), intent_.embed(batch.intent)}, 1);
    auto h = nn::relu(nn::linear(z, fc1_w_, fc1_b_));
    return detail::head_probs(h, fc2_w_, fc2_b_);
  }

  BatchNeeds needs() const override { return {.intent = true}; }

 private:
  detail::CnnEncoder<T> enc_;
  detail::IntentEmbed<T> intent_;
  nn::Tensor<T> fc1_w_, fc1_b_, fc2_w_, fc2_b_;
};

template <typename T>
class ConvLstmModel final : public Model<T> {
 public:
  ConvLstmModel(const ModelConfig& cfg, std::uint64_t seed, bool with_intent = false)
      : Model<T>(cfg, seed), with_intent_(with_intent) {
    cell_.w_x = this->params_.create(
        "convlstm.wx", {4 * cfg.convlstm_channels, cfg.frame_channels, 3, 3},
        nn::Init::kUniformFanIn);
    cell_.w_h = this->params_.create(
        "convlstm.wh", {4 * cfg.convlstm_channels, cfg.convlstm_channels, 3, 3},
        nn::Init::kUniformFanIn);
    cell_.b =
        this->params_.create("convlstm.b", {4 * cfg.convlstm_channels}, nn::Init::kZero);
    head_w_ = this->params_.create("head.w", {kNumClasses, cfg.convlstm_channels},
                                   nn::Init::kUniformFanIn);
    head_b_ = this->params_.create("head.b", {kNumClasses}, nn::Init::kZero);
    if (with_intent_) {
      intent_ = detail::IntentEmbed<T>::create(this->params_, cfg);
      // zero so an untrained model modulates with exact identity
      film_s_w_ = this->params_.create(
          "film.scale.w", {cfg.frame_channels, cfg.intent_dim}, nn::Init::kZero);
      film_s_b_ =
          this->params_.create("film.scale.b", {cfg.frame_channels}, nn::Init::kZero);
      film_t_w_ = this->params_.create(
          "film.shift.w", {cfg.frame_channels, cfg.intent_dim}, nn::Init::kZero);
      film_t_b_ =
          this->params_.create("film.shift.b", {cfg.frame_channels}, nn::Init::kZero);
    }
  }

  nn::Tensor<T> forward(const Batch<T>& batch) override {
    const auto& cfg = this->cfg_;
    detail::check_batch(cfg, batch.batch, batch.steps, true);
    const int n = batch.batch;
    const int side = cfg.frame_size / cfg.convlstm_pool;
    nn::Tensor<T> film_s, film_t;
    if (with_intent_) {
      auto emb = intent_.embed(batch.intent);
      film_s = nn::linear(emb, film_s_w_, film_s_b_);
      film_t = nn::linear(emb, film_t_w_, film_t_b_);
    }
    nn::Tensor<T> h({n, cfg.convlstm_channels, side, side});
    nn::Tensor<T> c = h;
    for (int t = 0; t < batch.steps; ++t) {
      auto x = nn::slice(batch.sequence, 0, t * n, n);
      if (with_intent_) x = nn::film(x, film_s, film_t);
      if (cfg.convlstm_pool > 1) x = nn::maxpool2d(x, cfg.convlstm_pool);
      auto [h2, c2] = nn::convlstm_cell(x, h, c, cell_);
      h = h2;
      c = c2;
    }
    return detail::head_probs(nn::global_avg_pool(h), head_w_, head_b_);
  }

  BatchNeeds needs() const override {
    return {.sequence = true, .intent = with_intent_};
  }

 private:
  bool with_intent_;
  nn::ConvLstmParams<T> cell_;
  detail::IntentEmbed<T> intent_;
  nn::Tensor<T> film_s_w_, film_s_b_, film_t_w_, film_t_b_;
  nn::Tensor<T> head_w_, head_b_;
};

template <typename T>
class CnnLstmIntentModel final : public Model<T> {
 public:
  CnnLstmIntentModel(const ModelConfig& cfg, std::uint64_t seed) : Model<T>(cfg, seed) {
    enc_ = detail::CnnEncoder<T>::create(this->params_, cfg);
    intent_ = detail::IntentEmbed<T>::create(this->params_, cfg);
    const int zdim = cfg.embedding_dim + cfg.intent_dim;
    lstm1_.w_ih = this->params_.create("lstm1.w_ih", {4 * cfg.lstm_hidden, zdim},
                                       nn::Init::kUniformFanIn);
    lstm1_.w_hh = this->params_.create(
        "lstm1.w_hh", {4 * cfg.lstm_hidden, cfg.lstm_hidden}, nn::Init::kUniformFanIn);
    lstm1_.b = this->params_.create("lstm1.b", {4 * cfg.lstm_hidden}, nn::Init::kZero);
    lstm2_.w_ih = this->params_.create(
        "lstm2.w_ih", {4 * cfg.lstm_hidden, cfg.lstm_hidden}, nn::Init::kUniformFanIn);
    lstm2_.w_hh = this->params_.create(
        "lstm2.w_hh", {4 * cfg.lstm_hidden, cfg.lstm_hidden}, nn::Init::kUniformFanIn);
    lstm2_.b = this->params_.create("lstm2.b", {4 * cfg.lstm_hidden}, nn::Init::kZero);
    head_w_ = this->params_.create("head.w", {kNumClasses, cfg.lstm_hidden},
                                   nn::Init::kUniformFanIn);
    head_b_ = this->params_.create("head.b", {kNumClasses}, nn::Init::kZero);
  }

  nn::Tensor<T> forward(const Batch<T>& batch) override {
    const auto& cfg = this->cfg_;
    detail::check_batch(cfg, batch.batch, batch.steps, true);
    const int n = batch.batch;
    // one encoder pass over every timestep of every example
    auto enc_all = enc_.encode(batch.sequence);
    auto emb_all = intent_.embed(batch.intent_steps);
    auto z_all = nn::concat<T>({enc_all, emb_all}, 1);
    nn::Tensor<T> h1({n, cfg.lstm_hidden}), c1 = h1;
    nn::Tensor<T> h2({n, cfg.lstm_hidden}), c2 = h2;
    for (int t = 0; t < batch.steps; ++t) {
      auto z = nn::slice(z_all, 0, t * n, n);
      auto [h1n, c1n] = nn::lstm_cell(z, h1, c1, lstm1_);
      h1 = h1n;
      c1 = c1n;
      auto [h2n, c2n] = nn::lstm_cell(h1, h2, c2, lstm2_);
      h2 = h2n;
      c2 = c2n;
    }
    return detail::head_probs(h2, head_w_, head_b_);
  }

  BatchNeeds needs() const override { return {.sequence = true, .intent_steps = true}; }

 private:
  detail::CnnEncoder<T> enc_;
  detail::IntentEmbed<T> intent_;
  nn::LstmParams<T> lstm1_, lstm2_;
  nn::Tensor<T> head_w_, head_b_;
};

template <typename T>
std::unique_ptr<Model<T>> build_model(const ModelConfig& cfg, std::uint64_t init_seed) {
  cfg.validate();
  switch (cfg.architecture) {
    case Architecture::kCnn:
      return std::make_unique<CnnModel<T>>(cfg, init_seed);
    case Architecture::kCnnIntent:
      return std::make_unique<CnnIntentModel<T>>(cfg, init_seed);
    case Architecture::kConvLstm:
      return std::make_unique<ConvLstmModel<T>>(cfg, init_seed, false);
    case Architecture::kConvLstmIntent:
      return std::make_unique<ConvLstmModel<T>>(cfg, init_seed, true);
    case Architecture::kCnnLstmIntent:
      return std::make_unique<CnnLstmIntentModel<T>>(cfg, init_seed);
  }
  fail("build_model: bad architecture");
}

// closed-form trainable value count for a config
std::size_t expected_param_count(const ModelConfig& cfg);

// multiply-accumulate count for one record's forward pass (all context steps)
std::size_t forward_mac_count(const ModelConfig& cfg);

}  // namespace egonav::models
