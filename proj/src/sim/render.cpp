#include "egonav/sim/render.hpp"

#include <algorithm>
#include <cmath>

namespace egonav::sim {

namespace {

constexpr double kMarchStepM = 0.25;
constexpr int kBisectIters = 16;

struct Shading {
  double max_dist;
  double wall_slope;  // intensity per meter
  std::uint8_t above;   // ceiling (indoor) or sky (outdoor)
};

Shading shading_for(SceneKind kind) {
  if (kind == SceneKind::kIndoor) return {16.0, 12.0, 18};
  return {28.0, 7.0, 205};
}

}  // namespace

bool inside_world(const WorldMap& world, const Vec2& pos) {
  const double r = world.corridor_width * 0.5;
  for (const auto& e : world.edges) {
    if (point_segment_distance(pos, world.nodes[e.a].pos, world.nodes[e.b].pos) <= r) {
      return true;
    }
  }
  return false;
}

double march_to_wall(const WorldMap& world, const Vec2& pos, const Vec2& dir,
                     double max_dist) {
  if (!inside_world(world, pos)) return 0.0;
  double lo = 0.0;
  double hi = kMarchStepM;
  while (hi < max_dist && inside_world(world, pos + hi * dir)) {
    lo = hi;
    hi += kMarchStepM;
  }
  if (hi >= max_dist) {
    if (inside_world(world, pos + max_dist * dir)) return max_dist;
    hi = max_dist;
  }
  for (int i = 0; i < kBisectIters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (inside_world(world, pos + mid * dir)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Frame render_frame(const WorldMap& world, const Vec2& pos, double heading_deg) {
  const Shading sh = shading_for(world.kind);
  const int n = kFrameSize;
  const double half = n / 2.0;
  const double f = half / std::tan(deg_to_rad(kHfovDeg / 2.0));

  Frame frame;
  for (int x = 0; x < n; ++x) {
    const double off = std::atan((x + 0.5 - half) / f);  // radians, + is right
    const Vec2 dir = heading_dir(heading_deg + rad_to_deg(off));
    const double d = march_to_wall(world, pos, dir, sh.max_dist);
    const double d_perp = std::max(d * std::cos(off), 0.05);

    const double wall_val =
        std::clamp(40.0 + sh.wall_slope * d, 0.0, 230.0);
    const double hh = f * kWallHalfHeightM / d_perp;  // half height, pixels
    const double top = half - hh;
    const double bottom = half + hh;

    for (int y = 0; y < n; ++y) {
      const double yc = y + 0.5;
      double v;
      if (yc < top) {
        v = sh.above;
      } else if (yc < bottom) {
        v = wall_val;
      } else {
        const double d_floor = f * kWallHalfHeightM / (yc - half);
        v = std::clamp(150.0 - 6.0 * d_floor, 40.0, 150.0);
      }
      frame.set(x, y, static_cast<std::uint8_t>(std::lround(v)));
    }
  }
  return frame;
}

}  // namespace egonav::sim
