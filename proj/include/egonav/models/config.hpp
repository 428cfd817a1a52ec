#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "egonav/core/frame.hpp"

namespace egonav::models {

enum class Architecture {
  kCnn,
  kCnnIntent,
  kConvLstm,
  kConvLstmIntent,
  kCnnLstmIntent,
};

const char* architecture_name(Architecture a);
std::optional<Architecture> architecture_from_name(const std::string& name);

inline constexpr Architecture kAllArchitectures[] = {
    Architecture::kCnn, Architecture::kCnnIntent, Architecture::kConvLstm,
    Architecture::kConvLstmIntent, Architecture::kCnnLstmIntent};

inline bool architecture_uses_intent(Architecture a) {
  return a == Architecture::kCnnIntent || a == Architecture::kConvLstmIntent ||
         a == Architecture::kCnnLstmIntent;
}
inline bool architecture_uses_sequence(Architecture a) {
  return a == Architecture::kConvLstm || a == Architecture::kConvLstmIntent ||
         a == Architecture::kCnnLstmIntent;
}

struct ModelConfig {
  Architecture architecture = Architecture::kCnnLstmIntent;
  int frame_size = kFrameSize;
  int frame_channels = 1;
  int context_length = kContextLength;
  int embedding_dim = 64;     // E, frame embedding
  int intent_dim = 16;        // D, intent embedding
  int lstm_hidden = 64;       // H
  int base_channels = 4;      // conv trunk widths: b, 2b, 4b, 8b
  int mlp_hidden = 128;
  int convlstm_channels = 8;  // recurrent state channels
  int convlstm_pool = 4;      // frame downsample ahead of the recurrent cell

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

nlohmann::json model_config_to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace egonav::models
