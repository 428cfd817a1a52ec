#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace egonav {

struct SceneSize {
  std::string scene_id;
  std::size_t record_count = 0;
};

// scene-disjoint split; a scene id appears in exactly one list
struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;

  bool contains(const std::string& scene_id) const;
  bool operator==(const DatasetSplit&) const = default;
};

nlohmann::json split_to_json(const DatasetSplit& s);
DatasetSplit split_from_json(const nlohmann::json& j);

// greedy assignment balancing record counts against the ratios; deterministic in
// (scenes, ratios, seed); every split with a positive ratio gets at least one scene
DatasetSplit split_dataset(const std::vector<SceneSize>& scenes,
                           std::array<double, 3> ratios, std::uint64_t seed);

inline constexpr std::array<double, 3> kDefaultSplitRatios = {0.6, 0.2, 0.2};

}  // namespace egonav
