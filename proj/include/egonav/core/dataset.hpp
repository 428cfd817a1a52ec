#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "egonav/core/frame_store.hpp"
#include "egonav/core/record.hpp"
#include "egonav/core/split.hpp"
#include "egonav/intent/intent.hpp"

namespace egonav {

enum class SceneKind { kIndoor, kOutdoor };

inline const char* scene_kind_name(SceneKind k) {
  return k == SceneKind::kIndoor ? "indoor" : "outdoor";
}

// scene ids are "<kind>_<tag>", e.g. "indoor_0007"
SceneKind scene_kind_from_id(const std::string& scene_id);
std::string make_scene_id(SceneKind kind, std::uint64_t tag);

// one contiguous walk: frames at 2 fps plus the records built from them
struct Scene {
  std::string id;
  SceneKind kind = SceneKind::kIndoor;
  FrameStore frames;
  std::vector<Record> records;
  std::optional<intent::Route> route;  // outdoor scenes
};

// sensor stream serialization (one JSON object per line)
nlohmann::json sensor_to_json(const SensorSample& s);
SensorSample sensor_from_json(const nlohmann::json& j);
void save_sensors(const std::filesystem::path& path,
                  const std::vector<SensorSample>& sensors);
std::vector<SensorSample> load_sensors(const std::filesystem::path& path);

// per-scene files inside a dataset directory:
//   <id>.frames        raw 128x128 u8, one frame after another
//   <id>.records.jsonl one record per line
//   <id>.sensors.jsonl 10 Hz sensor stream
//   <id>.route.json    outdoor only
void save_scene(const std::filesystem::path& dir, const Scene& scene);
Scene load_scene(const std::filesystem::path& dir, const std::string& scene_id);

struct Dataset {
  std::filesystem::path dir;
  std::vector<Scene> scenes;  // sorted by id

  const Scene* find(const std::string& scene_id) const;
  const Scene& at(const std::string& scene_id) const;  // throws on unknown id
  std::vector<SceneSize> sizes() const;
  std::size_t total_records() const;
};

// loads every scene that has a records file in `dir`
Dataset load_dataset(const std::filesystem::path& dir);

// loads only the named scenes
Dataset load_dataset(const std::filesystem::path& dir,
                     const std::vector<std::string>& scene_ids);

}  // namespace egonav
