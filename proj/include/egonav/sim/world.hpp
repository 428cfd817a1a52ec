#pragma once

#include <cstdint>
#include <vector>

#include "egonav/common/geometry.hpp"
#include "egonav/core/dataset.hpp"

namespace egonav::sim {

struct WorldNode {
  Vec2 pos;                    // local meters, east/north
  std::vector<int> neighbors;  // sorted node ids
};

struct WorldEdge {
  int a = 0;
  int b = 0;
};

// corridor (indoor) or street (outdoor) network; edges are straight segments
// of uniform width whose union forms the walkable space
struct WorldMap {
  SceneKind kind = SceneKind::kIndoor;
  std::vector<WorldNode> nodes;
  std::vector<WorldEdge> edges;
  double corridor_width = 2.2;
  GpsFix anchor;  // lat/lon of the local origin (outdoor)

  GpsFix node_gps(int id) const;
  bool has_edge(int a, int b) const;
  WorldMap mirrored() const;  // x -> -x
};

inline constexpr double kIndoorCorridorWidth = 2.2;
inline constexpr double kOutdoorStreetWidth = 3.0;
inline constexpr GpsFix kOutdoorAnchor{45.0, 7.0};

// indoor: full grid with jittered row/column spacing (interior nodes keep all
// 4 exits); outdoor: grid with jittered node positions plus random edge
// removal that preserves connectivity and degree >= 2
WorldMap generate_world(std::uint64_t seed, SceneKind kind, int grid_size);

}  // namespace egonav::sim
