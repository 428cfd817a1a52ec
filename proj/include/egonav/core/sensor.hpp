#pragma once

#include <optional>

namespace egonav {

struct GpsFix {
  double lat = 0.0;
  double lon = 0.0;
  bool operator==(const GpsFix&) const = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  bool operator==(const Vec3&) const = default;
};

// one 10 Hz sensor tick
struct SensorSample {
  double t = 0.0;                // seconds since scene start
  double heading = 0.0;          // compass degrees [0, 360), clockwise from north
  std::optional<GpsFix> gps;     // outdoor scenes only
  Vec3 accel;                    // m/s^2, device frame
  Vec3 gyro;                     // rad/s, z = yaw rate (clockwise positive)
  double step_count = 0.0;       // pedometer, cumulative
  Vec3 magnetic;                 // uT

  bool operator==(const SensorSample&) const = default;
};

}  // namespace egonav
