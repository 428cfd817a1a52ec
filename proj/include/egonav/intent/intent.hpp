#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "egonav/core/sensor.hpp"

namespace egonav::intent {

// order fixes the one-hot layout
enum class Maneuver : int {
  kTurnSlightLeft = 0,
  kTurnSharpLeft = 1,
  kTurnLeft = 2,
  kTurnSlightRight = 3,
  kTurnSharpRight = 4,
  kTurnRight = 5,
  kStraight = 6,
};
inline constexpr int kManeuverCount = 7;

const char* maneuver_name(Maneuver m);
std::optional<Maneuver> maneuver_from_name(std::string_view name);

struct RouteStep {
  GpsFix start;
  GpsFix end;
  Maneuver maneuver = Maneuver::kStraight;  // the turn at the step's end
  bool operator==(const RouteStep&) const = default;
};

// navigation route: consecutive steps chain (end[i] == start[i+1])
struct Route {
  std::vector<RouteStep> steps;
  bool operator==(const Route&) const = default;
};

inline constexpr double kChainToleranceDeg = 1e-9;

// throws with the failing step index on schema or chain violations
Route route_from_json(const nlohmann::json& j);
Route parse_route(const std::string& text);
nlohmann::json route_to_json(const Route& r);

// equirectangular projection to meters around `origin`
inline constexpr double kEarthRadiusM = 6371000.0;

struct LocalXY {
  double east = 0.0;
  double north = 0.0;
};

LocalXY project_local(const GpsFix& origin, const GpsFix& point);
GpsFix unproject_local(const GpsFix& origin, const LocalXY& xy);

// index of the route step whose segment is closest to `gps` (ties -> smallest)
std::size_t select_segment(const Route& route, const GpsFix& gps);

// one-hot maneuver (7) + step start (2) + step end (2) + current fix (2),
// local meters anchored at the selected step's start
inline constexpr int kIntentDim = 13;
using IntentFeature = std::array<double, kIntentDim>;

IntentFeature encode_intent_for_step(const Route& route, std::size_t step,
                                     const GpsFix& gps);
IntentFeature encode_intent(const Route& route, const GpsFix& gps);

inline IntentFeature zero_intent() { return IntentFeature{}; }

}  // namespace egonav::intent
