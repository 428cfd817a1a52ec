#include "egonav/sim/sensors.hpp"

#include <cmath>

#include "egonav/common/geometry.hpp"
#include "egonav/common/rng.hpp"
#include "egonav/intent/intent.hpp"

namespace egonav::sim {

namespace {

constexpr double kGravityMps2 = 9.81;
constexpr double kStepLengthM = 0.7;
constexpr double kEarthFieldHorizUt = 22.0;
constexpr double kEarthFieldVertUt = -40.0;

}  // namespace

std::vector<SensorSample> sensors_from_trace(const WalkTrace& trace,
                                             const WorldMap& world,
                                             const NoiseConfig& noise,
                                             std::uint64_t seed) {
  std::vector<SensorSample> out;
  out.reserve(trace.poses.size());
  double walked_m = 0.0;
  for (std::size_t k = 0; k < trace.poses.size(); ++k) {
    const Pose& pose = trace.poses[k];
    // per-tick stream so inserting a sensor never shifts later draws
    Rng rng = Rng::from_stream(seed, static_cast<std::uint64_t>(k));

    SensorSample s;
    s.t = pose.t;
    s.heading =
        wrap_heading(pose.heading + rng.normal(0.0, noise.heading_sigma_deg));

    if (world.kind == SceneKind::kOutdoor) {
      const double axis_sigma = noise.gps_rms_m / std::sqrt(2.0);
      const Vec2 noisy = pose.pos + Vec2{rng.normal(0.0, axis_sigma),
                                         rng.normal(0.0, axis_sigma)};
      s.gps = intent::unproject_local(world.anchor, {noisy.x, noisy.y});
    }

    // forward speed change between ticks, felt along device y
    double dv = 0.0;
    if (k > 0) dv = pose.speed - trace.poses[k - 1].speed;
    s.accel = {rng.normal(0.0, noise.accel_sigma_mps2),
               dv / kSensorPeriodS + rng.normal(0.0, noise.accel_sigma_mps2),
               kGravityMps2 + rng.normal(0.0, noise.accel_sigma_mps2)};

    s.gyro = {rng.normal(0.0, noise.gyro_sigma_rps),
              rng.normal(0.0, noise.gyro_sigma_rps),
              deg_to_rad(pose.yaw_rate) + rng.normal(0.0, noise.gyro_sigma_rps)};

    if (k > 0) walked_m += norm(pose.pos - trace.poses[k - 1].pos);
    s.step_count = walked_m / kStepLengthM;

    const double h = deg_to_rad(pose.heading);
    s.magnetic = {-kEarthFieldHorizUt * std::sin(h) +
                      rng.normal(0.0, noise.magnetic_sigma_ut),
                  kEarthFieldHorizUt * std::cos(h) +
                      rng.normal(0.0, noise.magnetic_sigma_ut),
                  kEarthFieldVertUt + rng.normal(0.0, noise.magnetic_sigma_ut)};

    out.push_back(s);
  }
  return out;
}

}  // namespace egonav::sim
