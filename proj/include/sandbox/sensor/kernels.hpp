#pragma once

#include "sandbox/persona/persona.hpp"

#include <array>
#include <cstdint>

// Per-channel signal models. The formulas are written out in docs/kernels.md;
// tests re-derive expected values from that document, not from this code.
namespace sandbox::sensor {

using persona::ActivityLevel;
using persona::LightCurve;
using persona::SensorProfile;

inline constexpr double kStandardGravity = 9.80665;

bool awake(const SensorProfile& p, double local_hour);
ActivityLevel activity_level(const SensorProfile& p, double local_hour);
double activity_intensity(ActivityLevel level);

// Raised-cosine daylight over [sunrise, sunset), floored at night_floor_lux.
double outdoor_lux(const LightCurve& c, double local_hour);
// Exposure seen by the phone: indoor/outdoor mix while awake, floor while asleep.
double exposure_lux(const SensorProfile& p, double local_hour);

// Probability that a cadence slot in this local hour carries a step.
std::array<double, 24> step_probability_by_hour(const SensorProfile& p);

struct MotionSample {
  std::array<double, 3> gravity;
  std::array<double, 3> linear;
  std::array<double, 3> accel;
  std::array<double, 3> gyro;
  std::array<double, 3> orientation_deg;  // azimuth [0, 360), pitch, roll
  std::array<double, 4> quaternion;       // x, y, z, w; unit norm
  std::array<double, 3> magnetic;
};

// All motion channels at one instant come from one draw, so accelerometer ==
// gravity + linear_acceleration exactly.
MotionSample sample_motion(const SensorProfile& p, double local_hour, std::uint64_t seed, std::int64_t t_ms);

}  // namespace sandbox::sensor
