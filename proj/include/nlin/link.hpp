// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "nlin/fiber.hpp"

namespace nlin {

struct RoadmConfig {
  bool active = false;
  double passband_width = 37.5e9;  // [Hz]; the channel spacing
  std::uint64_t seed = 0;          // base of the per-(span, channel) replacement seeds
  bool recondition = true;         // random delay/rotation on every fresh copy

  std::uint64_t replacement_seed(std::size_t span, int channel) const;
};

struct LinkConfig {
  int span_count = 10;
  FiberParams fiber;  // fiber.length is the span length
  RoadmConfig roadm;
  double launch_power_per_channel = 2e-3;  // [W]
  std::optional<double> amplifier_gain_db;  // defaults to the span loss

  double span_length() const { return fiber.length; }
  double gain_db() const { return amplifier_gain_db ? *amplifier_gain_db : fiber.loss_db(); }
  void validate() const;
};

// Seed streams of one realization. Every random draw of a run derives from
// (realization seed, purpose, indices), so a calibration run and the full run
// reproduce identical channel-under-test waveforms, conditioning and PMD.
namespace seeds {
enum Purpose : std::uint64_t { kData = 1, kCondition = 2, kPmd = 3, kRoadm = 4 };
std::uint64_t channel_data(std::uint64_t realization, int channel);
std::uint64_t channel_condition(std::uint64_t realization, int channel);
std::uint64_t pmd(std::uint64_t realization);
std::uint64_t roadm(std::uint64_t realization);
}  // namespace seeds

}  // namespace nlin
