#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "egonav/core/frame.hpp"
#include "egonav/core/label.hpp"
#include "egonav/core/sensor.hpp"

namespace egonav {

// one training/eval example: a frame, its context window, and the target
struct Record {
  std::int32_t frame_id = 0;
  std::array<std::int32_t, kContextLength> context_ids{};  // oldest first
  LabelVector label;
  std::optional<GpsFix> gps;                // outdoor only
  std::optional<std::int32_t> intent_step;  // route step index, outdoor only
  std::string scene_id;
  double t = 0.0;                           // capture time, seconds

  bool operator==(const Record&) const = default;
};

// pad-by-repeat context for frame `frame_id`: the previous kContextLength ids,
// clamped at 0 (early frames repeat frame 0)
std::array<std::int32_t, kContextLength> context_for_frame(std::int32_t frame_id);

nlohmann::json record_to_json(const Record& r);
Record record_from_json(const nlohmann::json& j);

// versioned little-endian binary codec; decode reports the byte offset on error
std::vector<std::uint8_t> encode_record(const Record& r);
Record decode_record(std::span<const std::uint8_t> bytes);

}  // namespace egonav
