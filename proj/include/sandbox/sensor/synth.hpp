#pragma once

#include "sandbox/persona/persona.hpp"
#include "sandbox/sensor/channel.hpp"
#include "sandbox/sensor/route.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace sandbox::sensor {

using SampleRates = std::map<Channel, double>;

struct TraceWindow {
  std::int64_t start_ms = 0;     // epoch ms of t = 0
  std::int64_t duration_ms = 0;  // frames cover [0, duration_ms]

  friend bool operator==(const TraceWindow&, const TraceWindow&) = default;
};

// Motion 10 Hz, light 1 Hz, step_counter 1 Hz, gps and cell 0.2 Hz.
// step_detector is event driven; its entry only switches it on.
// system_time and time_zone are emitted once at t = 0 unless given a rate.
SampleRates default_sample_rates();

struct TracePlan {
  std::string persona_id;
  std::uint64_t seed = 0;
  TraceWindow window;
  double clock_scale = 1.0;
  std::int64_t initial_steps = 0;
  SampleRates sample_rates;
  std::vector<SensorFrame> frames;

  friend bool operator==(const TracePlan&, const TracePlan&) = default;
};

struct SynthOptions {
  std::string persona_id;
  double clock_scale = 1.0;
  std::int64_t initial_steps = 0;
};

// Precomputed per-trace state (step events, commute track, cell anchors) behind
// the per-channel kernels.
class TraceKernels {
 public:
  TraceKernels(const persona::SensorProfile& profile, TraceWindow window, std::uint64_t seed,
               std::int64_t initial_steps = 0);

  double local_hour(std::int64_t t_ms) const;
  SensorFrame sample(Channel channel, std::int64_t t_ms) const;
  // Step detector timestamps in [0, duration], ascending.
  const std::vector<std::int64_t>& step_events() const { return steps_; }
  std::int64_t step_count_at(std::int64_t t_ms) const;
  const Track& track() const { return track_; }

 private:
  const persona::SensorProfile& profile_;
  TraceWindow window_;
  std::uint64_t seed_;
  int offset_min_;
  std::int64_t initial_steps_;
  std::vector<std::int64_t> steps_;
  Track track_;
  std::array<double, 3> home_cell_{};
  std::array<double, 3> work_cell_{};
  geo::LatLon home_;
  geo::LatLon work_;
};

TracePlan synthesize_trace(const persona::SensorProfile& profile, TraceWindow window, std::uint64_t seed,
                           const SampleRates& rates, const SynthOptions& options = {});

// One frame on one channel at t_ms into a window starting at epoch_start_ms.
// Stateful channels (steps, gps) are evaluated as if the trace began at t = 0.
SensorFrame sample_channel(const persona::SensorProfile& profile, Channel channel, std::int64_t t_ms,
                           std::uint64_t rng_state, std::int64_t epoch_start_ms = 0);

// Sample times for a channel at `rate_hz` over [0, duration_ms].
std::vector<std::int64_t> sample_times(double rate_hz, std::int64_t duration_ms);

// Cell identity (mcc, mnc, cell_id) served at an anchor.
std::array<double, 3> cell_for_anchor(geo::LatLon anchor);

}  // namespace sandbox::sensor
