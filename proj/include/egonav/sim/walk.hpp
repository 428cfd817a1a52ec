#pragma once

#include <optional>
#include <set>

#include "egonav/intent/intent.hpp"
#include "egonav/sim/world.hpp"

namespace egonav::sim {

inline constexpr double kWalkSpeedMps = 0.72;
inline constexpr double kTurnRateDps = 45.0;  // in-place rotation at junctions

struct JunctionTurn {
  int node = 0;
  double angle = 0.0;  // signed degrees, positive = clockwise = right
  std::set<DirClass> alternatives;  // exits available on arrival
};

struct WalkPlan {
  std::vector<int> path;            // node ids, length >= 2
  std::vector<JunctionTurn> turns;  // one per interior path node
  std::optional<intent::Route> route;  // outdoor walks carry a route
};

// derives turn angles, exit alternatives, and (outdoor) the route from the
// path geometry; a mirrored world re-derives everything flipped
WalkPlan annotate_path(const WorldMap& world, std::vector<int> path);

// indoor: random walk that turns whenever a side exit exists;
// outdoor: chained shortest paths toward far-away targets
WalkPlan plan_walk(const WorldMap& world, std::uint64_t seed, double min_duration_s);

struct Pose {
  double t = 0.0;
  Vec2 pos;
  double heading = 0.0;   // degrees [0, 360)
  double speed = 0.0;     // m/s along heading
  double yaw_rate = 0.0;  // deg/s, positive clockwise
};

struct ScriptTurn {
  double t_start = 0.0;
  double t_end = 0.0;
  double angle = 0.0;  // signed degrees
  std::set<DirClass> alternatives;
};

// continuous-time piecewise profile: constant-speed legs alternating with
// constant-rate in-place turns; event times are exact
class WalkProfile {
 public:
  static WalkProfile build(const WorldMap& world, const WalkPlan& plan);

  double duration() const { return duration_; }
  double initial_heading() const { return initial_heading_; }
  Pose pose_at(double t) const;
  const std::vector<ScriptTurn>& turns() const { return turns_; }

 private:
  struct Segment {
    double t0 = 0.0, t1 = 0.0;
    bool turning = false;
    Vec2 p0, p1;
    double h0 = 0.0, h1 = 0.0;  // cumulative (unwrapped) headings
  };
  std::vector<Segment> segs_;
  std::vector<ScriptTurn> turns_;
  double duration_ = 0.0;
  double initial_heading_ = 0.0;
};

// stepped interface over the profile; one tick turns by at most
// kTurnRateDps * dt degrees and walks at most kWalkSpeedMps * dt meters
struct AgentState {
  double t = 0.0;
  Vec2 pos;
  double heading = 0.0;
  bool done = false;
};
AgentState step_agent(const AgentState& state, const WalkProfile& profile,
                      double dt = kSensorPeriodS);

struct WalkTrace {
  std::vector<Pose> poses;  // 10 Hz, starting at t = 0
  std::vector<ScriptTurn> turns;
  double initial_heading = 0.0;
};

// samples the profile at 10 Hz for `duration_s` seconds
WalkTrace trace_walk(const WorldMap& world, const WalkPlan& plan, double duration_s);

}  // namespace egonav::sim
