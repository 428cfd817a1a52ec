#include "egonav/sim/walk.hpp"

#include <algorithm>
#include <cmath>

#include "egonav/common/error.hpp"
#include "egonav/common/rng.hpp"
#include "egonav/labeling/labeling.hpp"

namespace egonav::sim {

namespace {

constexpr double kFrontConeDeg = 45.0;   // exit classification around straight-ahead
constexpr double kBehindConeDeg = 135.0;
constexpr double kRouteTurnMinDeg = 10.0;  // bends below this stay inside a step

std::optional<DirClass> classify_exit(double rel_deg) {
  const double a = std::abs(rel_deg);
  if (a <= kFrontConeDeg) return DirClass::kFront;
  if (a <= kBehindConeDeg) return rel_deg > 0 ? DirClass::kRight : DirClass::kLeft;
  return std::nullopt;  // behind
}

intent::Maneuver maneuver_for_angle(double angle) {
  const double a = std::abs(angle);
  const bool right = angle > 0;
  if (a < kRouteTurnMinDeg) return intent::Maneuver::kStraight;
  if (a < 40.0) {
    return right ? intent::Maneuver::kTurnSlightRight : intent::Maneuver::kTurnSlightLeft;
  }
  if (a <= 120.0) {
    return right ? intent::Maneuver::kTurnRight : intent::Maneuver::kTurnLeft;
  }
  return right ? intent::Maneuver::kTurnSharpRight : intent::Maneuver::kTurnSharpLeft;
}

double leg_bearing(const WorldMap& world, int a, int b) {
  return bearing_deg(world.nodes[a].pos, world.nodes[b].pos);
}

}  // namespace

WalkPlan annotate_path(const WorldMap& world, std::vector<int> path) {
  check(path.size() >= 2, "path needs at least 2 nodes, got ", path.size());
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    check(world.has_edge(path[i], path[i + 1]), "path nodes ", path[i], " and ",
          path[i + 1], " are not connected");
  }
  WalkPlan plan;
  plan.path = std::move(path);

  for (std::size_t j = 1; j + 1 < plan.path.size(); ++j) {
    const int prev = plan.path[j - 1];
    const int cur = plan.path[j];
    const int next = plan.path[j + 1];
    const double in_bearing = leg_bearing(world, prev, cur);
    JunctionTurn turn;
    turn.node = cur;
    turn.angle =
        labeling::circular_delta(in_bearing, leg_bearing(world, cur, next));
    for (int nb : world.nodes[cur].neighbors) {
      if (nb == prev) continue;
      const double rel =
          labeling::circular_delta(in_bearing, leg_bearing(world, cur, nb));
      if (auto d = classify_exit(rel)) turn.alternatives.insert(*d);
    }
    // the executed direction always counts as available
    if (turn.angle > labeling::kTurnThresholdDeg) {
      turn.alternatives.insert(DirClass::kRight);
    } else if (turn.angle < -labeling::kTurnThresholdDeg) {
      turn.alternatives.insert(DirClass::kLeft);
    }
    plan.turns.push_back(std::move(turn));
  }

  if (world.kind == SceneKind::kOutdoor) {
    intent::Route route;
    std::size_t step_start = 0;
    for (std::size_t j = 0; j < plan.turns.size(); ++j) {
      if (std::abs(plan.turns[j].angle) < kRouteTurnMinDeg) continue;
      intent::RouteStep step;
      step.start = world.node_gps(plan.path[step_start]);
      step.end = world.node_gps(plan.path[j + 1]);
      step.maneuver = maneuver_for_angle(plan.turns[j].angle);
      route.steps.push_back(step);
      step_start = j + 1;
    }
    intent::RouteStep last;
    last.start = world.node_gps(plan.path[step_start]);
    last.end = world.node_gps(plan.path.back());
    last.maneuver = intent::Maneuver::kStraight;
    route.steps.push_back(last);
    plan.route = route;
  }
  return plan;
}

namespace {

double path_duration(const WorldMap& world, const std::vector<int>& path) {
  double t = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    t += norm(world.nodes[path[i + 1]].pos - world.nodes[path[i]].pos) / kWalkSpeedMps;
    if (i >= 1) {
      const double turn = labeling::circular_delta(
          leg_bearing(world, path[i - 1], path[i]), leg_bearing(world, path[i], path[i + 1]));
      t += std::abs(turn) / kTurnRateDps;
    }
  }
  return t;
}

std::vector<int> plan_indoor_path(const WorldMap& world, Rng& rng,
                                  double min_duration_s) {
  const int start = static_cast<int>(rng.uniform_index(world.nodes.size()));
  const auto& first_exits = world.nodes[start].neighbors;
  check(!first_exits.empty(), "start node ", start, " has no exits");
  std::vector<int> path{start,
                        first_exits[rng.uniform_index(first_exits.size())]};
  while (path_duration(world, path) < min_duration_s) {
    const int prev = path[path.size() - 2];
    const int cur = path.back();
    const double in_bearing = leg_bearing(world, prev, cur);
    std::vector<int> turn_exits;
    std::vector<int> straight_exits;
    for (int nb : world.nodes[cur].neighbors) {
      if (nb == prev) continue;
      const double rel =
          labeling::circular_delta(in_bearing, leg_bearing(world, cur, nb));
      const auto d = classify_exit(rel);
      if (!d) continue;
      if (*d == DirClass::kFront) {
        straight_exits.push_back(nb);
      } else {
        turn_exits.push_back(nb);
      }
    }
    // turn whenever the junction offers one, otherwise continue straight
    int next;
    if (!turn_exits.empty()) {
      next = turn_exits[rng.uniform_index(turn_exits.size())];
    } else if (!straight_exits.empty()) {
      next = straight_exits[rng.uniform_index(straight_exits.size())];
    } else {
      next = prev;  // dead end
    }
    path.push_back(next);
  }
  return path;
}

// like the indoor wander, but passes straight through some junctions so the
// route carries multi-block steps and turn timing is not implied by every
// intersection
constexpr double kOutdoorTurnProb = 0.65;

std::vector<int> plan_outdoor_path(const WorldMap& world, Rng& rng,
                                   double min_duration_s) {
  const int start = static_cast<int>(rng.uniform_index(world.nodes.size()));
  const auto& first_exits = world.nodes[start].neighbors;
  check(!first_exits.empty(), "start node ", start, " has no exits");
  std::vector<int> path{start,
                        first_exits[rng.uniform_index(first_exits.size())]};
  while (path_duration(world, path) < min_duration_s) {
    const int prev = path[path.size() - 2];
    const int cur = path.back();
    const double in_bearing = leg_bearing(world, prev, cur);
    std::vector<int> turn_exits;
    std::vector<int> straight_exits;
    for (int nb : world.nodes[cur].neighbors) {
      if (nb == prev) continue;
      const double rel =
          labeling::circular_delta(in_bearing, leg_bearing(world, cur, nb));
      const auto d = classify_exit(rel);
      if (!d) continue;
      if (*d == DirClass::kFront) {
        straight_exits.push_back(nb);
      } else {
        turn_exits.push_back(nb);
      }
    }
    int next;
    if (!turn_exits.empty() &&
        (straight_exits.empty() || rng.bernoulli(kOutdoorTurnProb))) {
      next = turn_exits[rng.uniform_index(turn_exits.size())];
    } else if (!straight_exits.empty()) {
      next = straight_exits[rng.uniform_index(straight_exits.size())];
    } else {
      next = prev;  // dead end
    }
    path.push_back(next);
  }
  return path;
}

}  // namespace

WalkPlan plan_walk(const WorldMap& world, std::uint64_t seed, double min_duration_s) {
  check(min_duration_s > 0.0, "min_duration_s must be positive");
  Rng rng(seed);
  auto path = world.kind == SceneKind::kIndoor
                  ? plan_indoor_path(world, rng, min_duration_s)
                  : plan_outdoor_path(world, rng, min_duration_s);
  return annotate_path(world, std::move(path));
}

WalkProfile WalkProfile::build(const WorldMap& world, const WalkPlan& plan) {
  check(plan.path.size() >= 2, "profile needs a path of >= 2 nodes");
  WalkProfile profile;
  double t = 0.0;
  double heading = leg_bearing(world, plan.path[0], plan.path[1]);
  profile.initial_heading_ = heading;
  for (std::size_t i = 0; i + 1 < plan.path.size(); ++i) {
    const Vec2 a = world.nodes[plan.path[i]].pos;
    const Vec2 b = world.nodes[plan.path[i + 1]].pos;
    if (i >= 1) {
      const auto& turn = plan.turns[i - 1];
      if (turn.angle != 0.0) {
        const double dur = std::abs(turn.angle) / kTurnRateDps;
        profile.segs_.push_back({t, t + dur, true, a, a, heading, heading + turn.angle});
        profile.turns_.push_back({t, t + dur, turn.angle, turn.alternatives});
        heading += turn.angle;
        t += dur;
      }
    }
    const double dur = norm(b - a) / kWalkSpeedMps;
    profile.segs_.push_back({t, t + dur, false, a, b, heading, heading});
    t += dur;
  }
  profile.duration_ = t;
  return profile;
}

Pose WalkProfile::pose_at(double t) const {
  check(t >= 0.0, "pose_at: negative time ", t);
  check(!segs_.empty(), "pose_at: empty profile");
  if (t >= duration_) {
    const auto& s = segs_.back();
    return {t, s.p1, wrap_heading(s.h1), 0.0, 0.0};
  }
  // first segment whose end is past t
  std::size_t lo = 0, hi = segs_.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (segs_[mid].t1 <= t) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  const auto& s = segs_[lo];
  const double u = (t - s.t0) / (s.t1 - s.t0);
  if (s.turning) {
    const double h = s.h0 + u * (s.h1 - s.h0);
    return {t, s.p0, wrap_heading(h), 0.0, (s.h1 - s.h0) / (s.t1 - s.t0)};
  }
  return {t, s.p0 + u * (s.p1 - s.p0), wrap_heading(s.h0), kWalkSpeedMps, 0.0};
}

AgentState step_agent(const AgentState& state, const WalkProfile& profile, double dt) {
  check(dt > 0.0, "step_agent: dt must be positive");
  const double t = state.t + dt;
  const Pose p = profile.pose_at(t);
  return {t, p.pos, p.heading, t >= profile.duration()};
}

WalkTrace trace_walk(const WorldMap& world, const WalkPlan& plan, double duration_s) {
  check(duration_s > 0.0, "trace duration must be positive");
  const auto profile = WalkProfile::build(world, plan);
  check(profile.duration() + 1e-9 >= duration_s, "plan covers ", profile.duration(),
        " s, trace wants ", duration_s, " s");
  WalkTrace trace;
  trace.initial_heading = profile.initial_heading();
  const int ticks = static_cast<int>(std::llround(duration_s / kSensorPeriodS));
  trace.poses.reserve(static_cast<std::size_t>(ticks) + 1);
  for (int k = 0; k <= ticks; ++k) {
    trace.poses.push_back(profile.pose_at(k * kSensorPeriodS));
  }
  for (const auto& turn : profile.turns()) {
    if (turn.t_start < duration_s) trace.turns.push_back(turn);
  }
  return trace;
}

}  // namespace egonav::sim
