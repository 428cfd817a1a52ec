#include "egonav/models/models.hpp"

namespace egonav::models {

namespace {

struct Counts {
  std::size_t params = 0;
  std::size_t macs = 0;  // per frame
};

// 4 stride-2 3x3 conv blocks + GAP + embedding linear
Counts encoder_counts(const ModelConfig& cfg) {
  Counts out;
  int cin = cfg.frame_channels;
  int side = cfg.frame_size;
  for (int i = 0; i < 4; ++i) {
    const int cout = cfg.base_channels << i;
    side = (side + 2 - 3) / 2 + 1;
    out.params += (std::size_t)cout * cin * 9 + cout;
    out.macs += (std::size_t)side * side * cout * cin * 9;
    cin = cout;
  }
  out.params += (std::size_t)cfg.embedding_dim * cin + cfg.embedding_dim;
  out.macs += (std::size_t)cfg.embedding_dim * cin;
  return out;
}

std::size_t linear_params(int out, int in) { return (std::size_t)out * in + out; }

std::size_t intent_embed_params(const ModelConfig& cfg) {
  return linear_params(cfg.intent_dim, intent::kIntentDim);
}
std::size_t intent_embed_macs(const ModelConfig& cfg) {
  return (std::size_t)cfg.intent_dim * intent::kIntentDim;
}

std::size_t lstm_params(int hidden, int in) {
  return (std::size_t)4 * hidden * in + (std::size_t)4 * hidden * hidden + 4 * hidden;
}
std::size_t lstm_macs(int hidden, int in) {
  return (std::size_t)4 * hidden * in + (std::size_t)4 * hidden * hidden;
}

std::size_t convlstm_cell_params(const ModelConfig& cfg) {
  const std::size_t c = cfg.convlstm_channels;
  return 4 * c * cfg.frame_channels * 9 + 4 * c * c * 9 + 4 * c;
}
std::size_t convlstm_cell_macs(const ModelConfig& cfg) {
  const std::size_t side = cfg.frame_size / cfg.convlstm_pool;
  const std::size_t c = cfg.convlstm_channels;
  return side * side * (4 * c * cfg.frame_channels * 9 + 4 * c * c * 9);
}

}  // namespace

std::size_t expected_param_count(const ModelConfig& cfg) {
  cfg.validate();
  const auto enc = encoder_counts(cfg);
  switch (cfg.architecture) {
    case Architecture::kCnn:
      return enc.params + linear_params(kNumClasses, cfg.embedding_dim);
    case Architecture::kCnnIntent:
      return enc.params + intent_embed_params(cfg) +
             linear_params(cfg.mlp_hidden, cfg.embedding_dim + cfg.intent_dim) +
             linear_params(kNumClasses, cfg.mlp_hidden);
    case Architecture::kConvLstm:
      return convlstm_cell_params(cfg) + linear_params(kNumClasses, cfg.convlstm_channels);
    case Architecture::kConvLstmIntent:
      return convlstm_cell_params(cfg) +
             linear_params(kNumClasses, cfg.convlstm_channels) +
             intent_embed_params(cfg) +
             2 * linear_params(cfg.frame_channels, cfg.intent_dim);
    case Architecture::kCnnLstmIntent:
      return enc.params + intent_embed_params(cfg) +
             lstm_params(cfg.lstm_hidden, cfg.embedding_dim + cfg.intent_dim) +
             lstm_params(cfg.lstm_hidden, cfg.lstm_hidden) +
             linear_params(kNumClasses, cfg.lstm_hidden);
  }
  fail("expected_param_count: bad architecture");
}

std::size_t forward_mac_count(const ModelConfig& cfg) {
  cfg.validate();
  const auto enc = encoder_counts(cfg);
  const std::size_t steps = cfg.context_length + 1;
  const std::size_t head_cls = kNumClasses;
  switch (cfg.architecture) {
    case Architecture::kCnn:
      return enc.macs + head_cls * cfg.embedding_dim;
    case Architecture::kCnnIntent:
      return enc.macs + intent_embed_macs(cfg) +
             (std::size_t)cfg.mlp_hidden * (cfg.embedding_dim + cfg.intent_dim) +
             head_cls * cfg.mlp_hidden;
    case Architecture::kConvLstm:
      return steps * convlstm_cell_macs(cfg) + head_cls * cfg.convlstm_channels;
    case Architecture::kConvLstmIntent: {
      const std::size_t film_proj =
          intent_embed_macs(cfg) + 2 * cfg.frame_channels * cfg.intent_dim;
      const std::size_t film_apply = steps * (std::size_t)cfg.frame_channels *
                                     cfg.frame_size * cfg.frame_size;
      return film_proj + film_apply + steps * convlstm_cell_macs(cfg) +
             head_cls * cfg.convlstm_channels;
    }
    case Architecture::kCnnLstmIntent:
      return steps * (enc.macs + intent_embed_macs(cfg) +
                      lstm_macs(cfg.lstm_hidden, cfg.embedding_dim + cfg.intent_dim) +
                      lstm_macs(cfg.lstm_hidden, cfg.lstm_hidden)) +
             head_cls * cfg.lstm_hidden;
  }
  fail("forward_mac_count: bad architecture");
}

}  // namespace egonav::models
