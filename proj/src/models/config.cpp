#include "egonav/models/config.hpp"

#include "egonav/common/error.hpp"

namespace egonav::models {

namespace {

constexpr const char* kArchNames[] = {"cnn", "cnn_intent", "convlstm",
                                      "convlstm_intent", "cnn_lstm_intent"};

}  // namespace

const char* architecture_name(Architecture a) {
  const int i = static_cast<int>(a);
  check(i >= 0 && i < 5, "bad architecture value ", i);
  return kArchNames[i];
}

std::optional<Architecture> architecture_from_name(const std::string& name) {
  for (int i = 0; i < 5; ++i) {
    if (name == kArchNames[i]) return static_cast<Architecture>(i);
  }
  return std::nullopt;
}

void ModelConfig::validate() const {
  check(frame_size >= 8, "frame_size must be >= 8, got ", frame_size);
  check(frame_size % 2 == 0, "frame_size must be even, got ", frame_size);
  check(frame_channels >= 1, "frame_channels must be >= 1");
  check(context_length >= 1, "context_length must be >= 1, got ", context_length);
  check(embedding_dim >= 1 && intent_dim >= 1 && lstm_hidden >= 1 &&
            base_channels >= 1 && mlp_hidden >= 1 && convlstm_channels >= 1,
        "model dimensions must be positive");
  check(convlstm_pool >= 1 && frame_size % convlstm_pool == 0, "convlstm_pool ",
        convlstm_pool, " must divide frame_size ", frame_size);
}

nlohmann::json model_config_to_json(const ModelConfig& c) {
  return {
      {"architecture", architecture_name(c.architecture)},
      {"frame_size", c.frame_size},
      {"frame_channels", c.frame_channels},
      {"context_length", c.context_length},
      {"embedding_dim", c.embedding_dim},
      {"intent_dim", c.intent_dim},
      {"lstm_hidden", c.lstm_hidden},
      {"base_channels", c.base_channels},
      {"mlp_hidden", c.mlp_hidden},
      {"convlstm_channels", c.convlstm_channels},
      {"convlstm_pool", c.convlstm_pool},
  };
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  if (j.contains("architecture")) {
    const auto name = j["architecture"].get<std::string>();
    const auto a = architecture_from_name(name);
    check(a.has_value(), "unknown architecture \"", name, "\"");
    c.architecture = *a;
  }
  auto load = [&](const char* key, int& out) {
    if (j.contains(key)) out = j[key].get<int>();
  };
  load("frame_size", c.frame_size);
  load("frame_channels", c.frame_channels);
  load("context_length", c.context_length);
  load("embedding_dim", c.embedding_dim);
  load("intent_dim", c.intent_dim);
  load("lstm_hidden", c.lstm_hidden);
  load("base_channels", c.base_channels);
  load("mlp_hidden", c.mlp_hidden);
  load("convlstm_channels", c.convlstm_channels);
  load("convlstm_pool", c.convlstm_pool);
  c.validate();
  return c;
}

}  // namespace egonav::models
