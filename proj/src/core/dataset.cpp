#include "egonav/core/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "egonav/common/io.hpp"

namespace egonav {

SceneKind scene_kind_from_id(const std::string& scene_id) {
  if (scene_id.starts_with("indoor_")) return SceneKind::kIndoor;
  if (scene_id.starts_with("outdoor_")) return SceneKind::kOutdoor;
  fail("scene id \"", scene_id, "\" must start with indoor_ or outdoor_");
}

std::string make_scene_id(SceneKind kind, std::uint64_t tag) {
  std::ostringstream out;
  out << scene_kind_name(kind) << "_";
  out.width(4);
  out.fill('0');
  out << tag;
  return out.str();
}

nlohmann::json sensor_to_json(const SensorSample& s) {
  nlohmann::json j;
  j["t"] = s.t;
  j["heading"] = s.heading;
  if (s.gps) j["gps"] = {{"lat", s.gps->lat}, {"lng", s.gps->lon}};
  j["accel"] = {s.accel.x, s.accel.y, s.accel.z};
  j["gyro"] = {s.gyro.x, s.gyro.y, s.gyro.z};
  j["steps"] = s.step_count;
  j["magnetic"] = {s.magnetic.x, s.magnetic.y, s.magnetic.z};
  return j;
}

SensorSample sensor_from_json(const nlohmann::json& j) {
  SensorSample s;
  s.t = j.at("t").get<double>();
  s.heading = j.at("heading").get<double>();
  if (j.contains("gps") && !j["gps"].is_null()) {
    s.gps = GpsFix{j["gps"].at("lat").get<double>(), j["gps"].at("lng").get<double>()};
  }
  auto vec3 = [](const nlohmann::json& a) {
    return Vec3{a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
  };
  s.accel = vec3(j.at("accel"));
  s.gyro = vec3(j.at("gyro"));
  s.step_count = j.value("steps", 0.0);
  if (j.contains("magnetic")) s.magnetic = vec3(j["magnetic"]);
  return s;
}

void save_sensors(const std::filesystem::path& path,
                  const std::vector<SensorSample>& sensors) {
  std::ostringstream out;
  for (const auto& s : sensors) out << sensor_to_json(s).dump() << "\n";
  write_text_file(path, out.str());
}

std::vector<SensorSample> load_sensors(const std::filesystem::path& path) {
  std::ifstream in(path);
  check(in.good(), "cannot open ", path.string());
  std::vector<SensorSample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(sensor_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      fail(path.string(), ":", line_no, ": bad sensor line: ", e.what());
    }
  }
  return out;
}

void save_scene(const std::filesystem::path& dir, const Scene& scene) {
  std::filesystem::create_directories(dir);
  scene.frames.save(dir / (scene.id + ".frames"));
  std::ostringstream out;
  for (const auto& r : scene.records) out << record_to_json(r).dump() << "\n";
  write_text_file(dir / (scene.id + ".records.jsonl"), out.str());
  if (scene.route) {
    write_text_file(dir / (scene.id + ".route.json"),
                    intent::route_to_json(*scene.route).dump(2) + "\n");
  }
}

Scene load_scene(const std::filesystem::path& dir, const std::string& scene_id) {
  Scene scene;
  scene.id = scene_id;
  scene.kind = scene_kind_from_id(scene_id);
  scene.frames = FrameStore::load(dir / (scene_id + ".frames"));

  const auto records_path = dir / (scene_id + ".records.jsonl");
  std::ifstream in(records_path);
  check(in.good(), "cannot open ", records_path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      scene.records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      fail(records_path.string(), ":", line_no, ": bad record: ", e.what());
    }
    const auto& r = scene.records.back();
    check(r.scene_id == scene_id, records_path.string(), ":", line_no,
          ": record claims scene ", r.scene_id);
    check(r.frame_id >= 0 && r.frame_id < scene.frames.count(), records_path.string(),
          ":", line_no, ": frame id ", r.frame_id, " outside store of ",
          scene.frames.count());
    for (auto id : r.context_ids) {
      check(id >= 0 && id < scene.frames.count(), records_path.string(), ":", line_no,
            ": context id ", id, " outside store");
    }
  }

  const auto route_path = dir / (scene_id + ".route.json");
  if (std::filesystem::exists(route_path)) {
    scene.route = intent::parse_route(read_text_file(route_path));
  }
  return scene;
}

const Scene* Dataset::find(const std::string& scene_id) const {
  for (const auto& s : scenes) {
    if (s.id == scene_id) return &s;
  }
  return nullptr;
}

const Scene& Dataset::at(const std::string& scene_id) const {
  const Scene* s = find(scene_id);
  check(s != nullptr, "dataset has no scene \"", scene_id, "\"");
  return *s;
}

std::vector<SceneSize> Dataset::sizes() const {
  std::vector<SceneSize> out;
  out.reserve(scenes.size());
  for (const auto& s : scenes) out.push_back({s.id, s.records.size()});
  return out;
}

std::size_t Dataset::total_records() const {
  std::size_t n = 0;
  for (const auto& s : scenes) n += s.records.size();
  return n;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  check(std::filesystem::is_directory(dir), "dataset directory ", dir.string(),
        " does not exist");
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    const std::string suffix = ".records.jsonl";
    if (name.size() > suffix.size() && name.ends_with(suffix)) {
      ids.push_back(name.substr(0, name.size() - suffix.size()));
    }
  }
  std::sort(ids.begin(), ids.end());
  check(!ids.empty(), "no scenes found in ", dir.string());
  return load_dataset(dir, ids);
}

Dataset load_dataset(const std::filesystem::path& dir,
                     const std::vector<std::string>& scene_ids) {
  Dataset ds;
  ds.dir = dir;
  for (const auto& id : scene_ids) ds.scenes.push_back(load_scene(dir, id));
  std::sort(ds.scenes.begin(), ds.scenes.end(),
            [](const Scene& a, const Scene& b) { return a.id < b.id; });
  return ds;
}

}  // namespace egonav
