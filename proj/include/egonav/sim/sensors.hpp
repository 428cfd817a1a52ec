#pragma once

#include <cstdint>
#include <vector>

#include "egonav/core/sensor.hpp"
#include "egonav/sim/walk.hpp"
#include "egonav/sim/world.hpp"

namespace egonav::sim {

struct NoiseConfig {
  double heading_sigma_deg = 1.0;
  double gps_rms_m = 2.5;  // open-sky horizontal rms, split evenly across axes
  double gyro_sigma_rps = 0.02;
  double accel_sigma_mps2 = 0.15;
  double magnetic_sigma_ut = 0.5;

  static NoiseConfig noiseless() { return {0.0, 0.0, 0.0, 0.0, 0.0}; }
};

// one sample per trace pose, same order
std::vector<SensorSample> sensors_from_trace(const WalkTrace& trace,
                                             const WorldMap& world,
                                             const NoiseConfig& noise,
                                             std::uint64_t seed);

}  // namespace egonav::sim
