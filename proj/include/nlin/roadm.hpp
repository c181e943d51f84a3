// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "nlin/link.hpp"
#include "nlin/waveform.hpp"

namespace nlin {

struct Passband {
  double center = 0.0;  // offset from the signal center [Hz]
  double width = 0.0;   // [Hz]
};

// Ideal rectangular WSS: keeps bins with offset in [center - width/2,
// center + width/2) of any passband and zeroes everything else.
Signal wss_filter(const Signal& s, const std::vector<Passband>& passbands);

// ROADM node after a span. The CUT slot passes through (rectangular filter),
// every interferer slot is dropped and re-added from its fresh transmitter
// copy, re-conditioned with the per-(span, channel) seed and scaled to the
// power the dropped channel had at this point. `fresh` holds unconditioned
// baseband waveforms at the WDM sample rate (pre-dispersion already applied).
Signal replace_interferers(const Signal& wdm, const ChannelPlan& plan,
                           const std::vector<std::pair<ChannelSpec, Signal>>& fresh, std::size_t span_index,
                           const RoadmConfig& config);

}  // namespace nlin
