#include "egonav/sim/scene.hpp"

#include <cmath>

#include "egonav/common/error.hpp"
#include "egonav/common/rng.hpp"
#include "egonav/sim/render.hpp"

namespace egonav::sim {

namespace {

constexpr double kPlanMarginS = 2.0;  // plan past the trace end

}  // namespace

std::vector<labeling::TurnEvent> events_from_turns(
    const std::vector<ScriptTurn>& turns) {
  std::vector<labeling::TurnEvent> events;
  for (const auto& turn : turns) {
    if (std::abs(turn.angle) <= labeling::kTurnThresholdDeg) continue;
    labeling::TurnEvent ev;
    ev.t_start = turn.t_start;
    ev.t_end = turn.t_end;
    ev.direction = turn.angle > 0 ? DirClass::kRight : DirClass::kLeft;
    ev.alternatives = turn.alternatives;
    events.push_back(std::move(ev));
  }
  return events;
}

std::vector<LabelVector> label_from_sensors(
    const std::vector<SensorSample>& sensors,
    const std::vector<double>& record_times,
    const std::vector<labeling::TurnEvent>& events, bool indoor) {
  labeling::HeadingSeries series;
  series.reserve(sensors.size());
  for (const auto& s : sensors) series.push_back({s.t, s.heading});
  const auto smoothed = labeling::smooth_heading(series);

  std::vector<LabelVector> labels;
  labels.reserve(record_times.size());
  for (double t : record_times) {
    labels.push_back(labeling::future_label(smoothed, t));
  }
  if (indoor) {
    labels = labeling::expand_intersection_labels(labels, record_times, events);
  }
  return labels;
}

LabelVector scripted_label(const std::vector<ScriptTurn>& turns, bool indoor,
                           double t) {
  const double lo = t + labeling::kLabelHorizonS;
  const double hi = lo + labeling::kTurnIntervalS;
  double angle = 0.0;
  for (const auto& turn : turns) {
    const double dur = turn.t_end - turn.t_start;
    if (dur <= 0.0) continue;
    const double ov = std::min(hi, turn.t_end) - std::max(lo, turn.t_start);
    if (ov > 0.0) angle += turn.angle * ov / dur;
  }
  LabelVector label = labeling::classify_angle(angle);
  if (indoor) {
    for (const auto& turn : turns) {
      if (std::abs(turn.angle) <= labeling::kTurnThresholdDeg) continue;
      if (t >= turn.t_start - labeling::kExpandBeforeS &&
          t < turn.t_start + labeling::kExpandAfterS) {
        for (DirClass d : turn.alternatives) label.set(d, true);
      }
    }
  }
  return label;
}

std::vector<double> script_boundaries(const std::vector<ScriptTurn>& turns,
                                      bool indoor) {
  // window overlap at which the accumulated angle crosses the classify
  // threshold; in-place turns always rotate at the same rate
  const double cross = labeling::kTurnThresholdDeg / kTurnRateDps;
  std::vector<double> bounds;
  for (const auto& turn : turns) {
    if (std::abs(turn.angle) <= labeling::kTurnThresholdDeg) continue;
    bounds.push_back(turn.t_start - labeling::kLabelHorizonS -
                     labeling::kTurnIntervalS + cross);
    bounds.push_back(turn.t_end - labeling::kLabelHorizonS - cross);
    if (indoor) {
      bounds.push_back(turn.t_start - labeling::kExpandBeforeS);
      bounds.push_back(turn.t_start + labeling::kExpandAfterS);
    }
  }
  return bounds;
}

SceneScript make_script(const BuiltScene& built, double duration_s) {
  SceneScript s;
  s.kind = built.scene.kind;
  s.initial_heading = built.trace.initial_heading;
  s.duration_s = duration_s;
  s.turns = built.trace.turns;
  return s;
}

namespace {

DirClass dir_from_name(const std::string& name) {
  for (int c = 0; c < kNumClasses; ++c) {
    const auto d = static_cast<DirClass>(c);
    if (name == dir_name(d)) return d;
  }
  fail("unknown direction \"", name, "\"");
}

}  // namespace

nlohmann::json script_to_json(const SceneScript& s) {
  nlohmann::json turns = nlohmann::json::array();
  for (const auto& turn : s.turns) {
    nlohmann::json alts = nlohmann::json::array();
    for (DirClass d : turn.alternatives) alts.push_back(dir_name(d));
    turns.push_back({{"t_start", turn.t_start},
                     {"t_end", turn.t_end},
                     {"angle", turn.angle},
                     {"alternatives", std::move(alts)}});
  }
  return {{"kind", scene_kind_name(s.kind)},
          {"initial_heading", s.initial_heading},
          {"duration_s", s.duration_s},
          {"turns", std::move(turns)}};
}

SceneScript script_from_json(const nlohmann::json& j) {
  SceneScript s;
  const auto kind = j.at("kind").get<std::string>();
  check(kind == "indoor" || kind == "outdoor", "bad scene kind \"", kind, "\"");
  s.kind = kind == "indoor" ? SceneKind::kIndoor : SceneKind::kOutdoor;
  s.initial_heading = j.at("initial_heading").get<double>();
  s.duration_s = j.at("duration_s").get<double>();
  for (const auto& t : j.at("turns")) {
    ScriptTurn turn;
    turn.t_start = t.at("t_start").get<double>();
    turn.t_end = t.at("t_end").get<double>();
    turn.angle = t.at("angle").get<double>();
    for (const auto& a : t.at("alternatives")) {
      turn.alternatives.insert(dir_from_name(a.get<std::string>()));
    }
    s.turns.push_back(std::move(turn));
  }
  return s;
}

BuiltScene build_scene(std::uint64_t seed, SceneKind kind,
                       const SceneParams& params) {
  check(params.duration_s > 10.0, "scene duration too short: ", params.duration_s);
  const int grid = kind == SceneKind::kIndoor ? params.indoor_grid
                                              : params.outdoor_grid;
  // fold the kind in so indoor/outdoor scenes with the same tag differ
  const std::uint64_t base = hash_mix(seed, fnv1a(scene_kind_name(kind)));

  BuiltScene built;
  built.world = generate_world(hash_mix(base, fnv1a("world")), kind, grid);
  built.plan = plan_walk(built.world, hash_mix(base, fnv1a("plan")),
                         params.duration_s + kPlanMarginS);
  built.trace = trace_walk(built.world, built.plan, params.duration_s);
  built.sensors = sensors_from_trace(built.trace, built.world, params.noise,
                                     hash_mix(base, fnv1a("sensors")));

  Scene& scene = built.scene;
  scene.id = make_scene_id(kind, seed);
  scene.kind = kind;
  scene.route = built.plan.route;

  const int ticks_per_frame =
      static_cast<int>(std::llround(kFramePeriodS / kSensorPeriodS));
  const int n_frames =
      static_cast<int>(built.trace.poses.size() - 1) / ticks_per_frame + 1;
  for (int k = 0; k < n_frames; ++k) {
    const Pose& pose = built.trace.poses[static_cast<std::size_t>(k) * ticks_per_frame];
    scene.frames.append(render_frame(built.world, pose.pos, pose.heading));
  }

  // records stop where the label window would run past the sensor stream
  const int n_records = static_cast<int>(std::floor(
      (params.duration_s - labeling::kLabelHorizonS - labeling::kTurnIntervalS) /
          kFramePeriodS +
      1e-9)) + 1;
  check(n_records <= n_frames, "record window exceeds rendered frames");
  built.record_times.reserve(n_records);
  for (int k = 0; k < n_records; ++k) built.record_times.push_back(k * kFramePeriodS);

  const bool indoor = kind == SceneKind::kIndoor;
  const auto events = events_from_turns(built.trace.turns);
  const auto labels =
      label_from_sensors(built.sensors, built.record_times, events, indoor);

  scene.records.reserve(n_records);
  built.script_labels.reserve(n_records);
  for (int k = 0; k < n_records; ++k) {
    Record r;
    r.frame_id = k;
    r.context_ids = context_for_frame(k);
    r.label = labels[static_cast<std::size_t>(k)];
    r.scene_id = scene.id;
    r.t = built.record_times[static_cast<std::size_t>(k)];
    if (!indoor) {
      const auto& sample =
          built.sensors[static_cast<std::size_t>(k) * ticks_per_frame];
      r.gps = sample.gps;
      r.intent_step = static_cast<std::int32_t>(
          intent::select_segment(*scene.route, *r.gps));
    }
    scene.records.push_back(std::move(r));
    built.script_labels.push_back(
        scripted_label(built.trace.turns, indoor, built.record_times[k]));
  }
  return built;
}

}  // namespace egonav::sim
