#include "egonav/sim/world.hpp"

#include <algorithm>

#include "egonav/common/error.hpp"
#include "egonav/common/rng.hpp"
#include "egonav/intent/intent.hpp"

namespace egonav::sim {

GpsFix WorldMap::node_gps(int id) const {
  check(id >= 0 && id < static_cast<int>(nodes.size()), "node ", id, " out of range");
  return intent::unproject_local(anchor, {nodes[id].pos.x, nodes[id].pos.y});
}

bool WorldMap::has_edge(int a, int b) const {
  const auto& nb = nodes[a].neighbors;
  return std::find(nb.begin(), nb.end(), b) != nb.end();
}

WorldMap WorldMap::mirrored() const {
  WorldMap m = *this;
  for (auto& n : m.nodes) n.pos.x = -n.pos.x;
  return m;
}

namespace {

void rebuild_neighbors(WorldMap& world) {
  for (auto& n : world.nodes) n.neighbors.clear();
  for (const auto& e : world.edges) {
    world.nodes[e.a].neighbors.push_back(e.b);
    world.nodes[e.b].neighbors.push_back(e.a);
  }
  for (auto& n : world.nodes) std::sort(n.neighbors.begin(), n.neighbors.end());
}

bool connected(const WorldMap& world) {
  if (world.nodes.empty()) return false;
  std::vector<char> seen(world.nodes.size(), 0);
  std::vector<int> queue{0};
  seen[0] = 1;
  std::size_t visited = 1;
  while (!queue.empty()) {
    const int cur = queue.back();
    queue.pop_back();
    for (int nb : world.nodes[cur].neighbors) {
      if (!seen[nb]) {
        seen[nb] = 1;
        ++visited;
        queue.push_back(nb);
      }
    }
  }
  return visited == world.nodes.size();
}

// cumulative positions from jittered per-row/column gaps
std::vector<double> jittered_axis(Rng& rng, int n, double base, double jitter) {
  std::vector<double> out(n, 0.0);
  for (int i = 1; i < n; ++i) {
    out[i] = out[i - 1] + base + rng.uniform(-jitter, jitter);
  }
  return out;
}

}  // namespace

WorldMap generate_world(std::uint64_t seed, SceneKind kind, int grid_size) {
  check(grid_size >= 2, "grid_size must be >= 2, got ", grid_size);
  Rng rng(seed);
  WorldMap world;
  world.kind = kind;
  world.anchor = kOutdoorAnchor;
  world.corridor_width =
      kind == SceneKind::kIndoor ? kIndoorCorridorWidth : kOutdoorStreetWidth;

  // legs sized against the 0.72 m/s gait so turn windows stay a minority of
  // each scene, and against gps noise so route segments resolve cleanly
  const double base = kind == SceneKind::kIndoor ? 14.0 : 24.0;
  const double axis_jitter = kind == SceneKind::kIndoor ? 2.0 : 3.0;
  const auto xs = jittered_axis(rng, grid_size, base, axis_jitter);
  const auto ys = jittered_axis(rng, grid_size, base, axis_jitter);

  auto id = [&](int row, int col) { return row * grid_size + col; };
  world.nodes.resize(static_cast<std::size_t>(grid_size) * grid_size);
  for (int r = 0; r < grid_size; ++r) {
    for (int c = 0; c < grid_size; ++c) {
      world.nodes[id(r, c)].pos = {xs[c], ys[r]};
    }
  }
  for (int r = 0; r < grid_size; ++r) {
    for (int c = 0; c < grid_size; ++c) {
      if (c + 1 < grid_size) world.edges.push_back({id(r, c), id(r, c + 1)});
      if (r + 1 < grid_size) world.edges.push_back({id(r, c), id(r + 1, c)});
    }
  }
  rebuild_neighbors(world);

  if (kind == SceneKind::kOutdoor) {
    std::vector<std::size_t> order(world.edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<char> dropped(world.edges.size(), 0);
    auto live_world = [&] {
      WorldMap trial = world;
      trial.edges.clear();
      for (std::size_t i = 0; i < world.edges.size(); ++i) {
        if (!dropped[i]) trial.edges.push_back(world.edges[i]);
      }
      rebuild_neighbors(trial);
      return trial;
    };
    for (std::size_t oi : order) {
      if (!rng.bernoulli(0.25)) continue;
      dropped[oi] = 1;
      const WorldMap trial = live_world();
      const bool degree_ok =
          trial.nodes[world.edges[oi].a].neighbors.size() >= 2 &&
          trial.nodes[world.edges[oi].b].neighbors.size() >= 2;
      if (!degree_ok || !connected(trial)) dropped[oi] = 0;
    }
    world = live_world();
  }
  return world;
}

}  // namespace egonav::sim
