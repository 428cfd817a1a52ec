#include "egonav/intent/intent.hpp"

#include <cmath>
#include <limits>

#include "egonav/common/error.hpp"
#include "egonav/common/geometry.hpp"

namespace egonav::intent {

namespace {

constexpr const char* kManeuverNames[kManeuverCount] = {
    "turn-slight-left", "turn-sharp-left",  "turn-left", "turn-slight-right",
    "turn-sharp-right", "turn-right",       "straight",
};

GpsFix gps_from_json(const nlohmann::json& j, std::size_t step, const char* field) {
  check(j.is_object() && j.contains("lat") && j.contains("lng"), "route step ", step,
        ": ", field, " must be an object with lat and lng");
  return {j["lat"].get<double>(), j["lng"].get<double>()};
}

}  // namespace

const char* maneuver_name(Maneuver m) {
  const int i = static_cast<int>(m);
  check(i >= 0 && i < kManeuverCount, "bad maneuver value ", i);
  return kManeuverNames[i];
}

std::optional<Maneuver> maneuver_from_name(std::string_view name) {
  for (int i = 0; i < kManeuverCount; ++i) {
    if (name == kManeuverNames[i]) return static_cast<Maneuver>(i);
  }
  return std::nullopt;
}

Route route_from_json(const nlohmann::json& j) {
  check(j.is_object() && j.contains("steps") && j["steps"].is_array(),
        "route: expected an object with a steps array");
  Route route;
  const auto& steps = j["steps"];
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    check(s.contains("start_location"), "route step ", i, ": missing start_location");
    check(s.contains("end_location"), "route step ", i, ": missing end_location");
    check(s.contains("maneuver"), "route step ", i, ": missing maneuver");
    RouteStep step;
    step.start = gps_from_json(s["start_location"], i, "start_location");
    step.end = gps_from_json(s["end_location"], i, "end_location");
    const auto name = s["maneuver"].get<std::string>();
    const auto m = maneuver_from_name(name);
    check(m.has_value(), "route step ", i, ": unknown maneuver \"", name, "\"");
    step.maneuver = *m;
    route.steps.push_back(step);
  }
  for (std::size_t i = 1; i < route.steps.size(); ++i) {
    const auto& prev = route.steps[i - 1].end;
    const auto& cur = route.steps[i].start;
    if (std::abs(prev.lat - cur.lat) > kChainToleranceDeg ||
        std::abs(prev.lon - cur.lon) > kChainToleranceDeg) {
      fail("route step ", i, ": start_location does not chain from step ", i - 1,
           " end_location");
    }
  }
  return route;
}

Route parse_route(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail("route: invalid JSON: ", e.what());
  }
  return route_from_json(j);
}

nlohmann::json route_to_json(const Route& r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : r.steps) {
    steps.push_back({
        {"start_location", {{"lat", s.start.lat}, {"lng", s.start.lon}}},
        {"end_location", {{"lat", s.end.lat}, {"lng", s.end.lon}}},
        {"maneuver", maneuver_name(s.maneuver)},
    });
  }
  return {{"steps", steps}};
}

LocalXY project_local(const GpsFix& origin, const GpsFix& point) {
  const double north = deg_to_rad(point.lat - origin.lat) * kEarthRadiusM;
  const double east =
      deg_to_rad(point.lon - origin.lon) * kEarthRadiusM * std::cos(deg_to_rad(origin.lat));
  return {east, north};
}

GpsFix unproject_local(const GpsFix& origin, const LocalXY& xy) {
  GpsFix out;
  out.lat = origin.lat + rad_to_deg(xy.north / kEarthRadiusM);
  out.lon = origin.lon +
            rad_to_deg(xy.east / (kEarthRadiusM * std::cos(deg_to_rad(origin.lat))));
  return out;
}

std::size_t select_segment(const Route& route, const GpsFix& gps) {
  check(!route.steps.empty(), "select_segment: empty route");
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < route.steps.size(); ++i) {
    const auto& s = route.steps[i];
    const LocalXY e = project_local(s.start, s.end);
    const LocalXY p = project_local(s.start, gps);
    const double d =
        point_segment_distance({p.east, p.north}, {0.0, 0.0}, {e.east, e.north});
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

IntentFeature encode_intent_for_step(const Route& route, std::size_t step,
                                     const GpsFix& gps) {
  check(step < route.steps.size(), "intent step ", step, " out of range, route has ",
        route.steps.size(), " steps");
  const auto& s = route.steps[step];
  IntentFeature f{};
  f[static_cast<std::size_t>(s.maneuver)] = 1.0;
  // start is the local anchor, so its coordinates are identically zero
  f[7] = 0.0;
  f[8] = 0.0;
  const LocalXY end = project_local(s.start, s.end);
  f[9] = end.east;
  f[10] = end.north;
  const LocalXY cur = project_local(s.start, gps);
  f[11] = cur.east;
  f[12] = cur.north;
  return f;
}

IntentFeature encode_intent(const Route& route, const GpsFix& gps) {
  return encode_intent_for_step(route, select_segment(route, gps), gps);
}

}  // namespace egonav::intent
