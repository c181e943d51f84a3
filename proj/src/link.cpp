// SPDX-License-Identifier: Apache-2.0
#include "nlin/link.hpp"

namespace nlin {

std::uint64_t RoadmConfig::replacement_seed(std::size_t span, int channel) const {
  return mix_seed(seed, span, static_cast<std::uint64_t>(static_cast<std::int64_t>(channel)));
}

void LinkConfig::validate() const {
  if (span_count < 0) throw ConfigError("link: span count must be non-negative");
  fiber.validate();
  if (!(launch_power_per_channel > 0.0)) throw ConfigError("link: launch power must be positive");
  if (roadm.active && !(roadm.passband_width > 0.0)) throw ConfigError("roadm: passband width must be positive");
}

namespace seeds {

namespace {
std::uint64_t channel_key(int channel) { return static_cast<std::uint64_t>(static_cast<std::int64_t>(channel)); }
}  // namespace

std::uint64_t channel_data(std::uint64_t realization, int channel) {
  return mix_seed(realization, kData, channel_key(channel));
}
std::uint64_t channel_condition(std::uint64_t realization, int channel) {
  return mix_seed(realization, kCondition, channel_key(channel));
}
std::uint64_t pmd(std::uint64_t realization) { return mix_seed(realization, kPmd); }
std::uint64_t roadm(std::uint64_t realization) { return mix_seed(realization, kRoadm); }

}  // namespace seeds

}  // namespace nlin
