#pragma once

#include "egonav/common/geometry.hpp"
#include "egonav/core/frame.hpp"
#include "egonav/sim/world.hpp"

namespace egonav::sim {

inline constexpr double kHfovDeg = 100.0;
inline constexpr double kWallHalfHeightM = 1.2;  // camera at mid wall height

// single-bounce column renderer over the corridor union: ray-march to the
// nearest wall per column, shade walls brighter with distance so openings
// read as bright gaps, then fill ceiling/sky above and a floor gradient below
Frame render_frame(const WorldMap& world, const Vec2& pos, double heading_deg);

// true when `pos` lies inside some corridor capsule
bool inside_world(const WorldMap& world, const Vec2& pos);

// distance along `dir` (unit) from `pos` to the corridor boundary, capped
double march_to_wall(const WorldMap& world, const Vec2& pos, const Vec2& dir,
                     double max_dist);

}  // namespace egonav::sim
