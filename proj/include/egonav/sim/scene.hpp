#pragma once

#include <cstdint>
#include <vector>

#include "egonav/core/dataset.hpp"
#include "egonav/labeling/labeling.hpp"
#include "egonav/sim/sensors.hpp"
#include "egonav/sim/walk.hpp"
#include "egonav/sim/world.hpp"

namespace egonav::sim {

struct SceneParams {
  int indoor_grid = 4;
  int outdoor_grid = 5;
  double duration_s = 90.0;
  NoiseConfig noise;
};

// everything produced while synthesizing one scene; tests lean on the
// intermediate stages, the dataset only keeps `scene` + `sensors`
struct BuiltScene {
  Scene scene;
  std::vector<SensorSample> sensors;
  WorldMap world;
  WalkPlan plan;
  WalkTrace trace;
  std::vector<double> record_times;
  std::vector<LabelVector> script_labels;  // analytic oracle, per record
};

BuiltScene build_scene(std::uint64_t seed, SceneKind kind,
                       const SceneParams& params);

// sensor-heading labeling pipeline shared with the CLI: smooth, look ahead,
// then OR in intersection alternatives for indoor scenes
std::vector<LabelVector> label_from_sensors(
    const std::vector<SensorSample>& sensors,
    const std::vector<double>& record_times,
    const std::vector<labeling::TurnEvent>& events, bool indoor);

// script turns -> labeling events (executed turns above threshold only)
std::vector<labeling::TurnEvent> events_from_turns(
    const std::vector<ScriptTurn>& turns);

// closed-form label straight from the walk script: the heading change over
// [t+1, t+1.5] is each turn's angle times its overlap fraction
LabelVector scripted_label(const std::vector<ScriptTurn>& turns, bool indoor,
                           double t);

// times where the scripted label can flip; comparisons against the pipeline
// stay clear of these by a safety margin
std::vector<double> script_boundaries(const std::vector<ScriptTurn>& turns,
                                      bool indoor);

// the ground truth a simulated scene was generated from, in file form so the
// labeling pipeline can be exercised standalone
struct SceneScript {
  SceneKind kind = SceneKind::kIndoor;
  double initial_heading = 0.0;
  double duration_s = 0.0;
  std::vector<ScriptTurn> turns;
};

SceneScript make_script(const BuiltScene& built, double duration_s);
nlohmann::json script_to_json(const SceneScript& s);
SceneScript script_from_json(const nlohmann::json& j);

}  // namespace egonav::sim
