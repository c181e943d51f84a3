// SPDX-License-Identifier: Apache-2.0
#include "nlin/roadm.hpp"

#include <algorithm>
#include <cmath>

#include "nlin/fft.hpp"

namespace nlin {

Signal wss_filter(const Signal& s, const std::vector<Passband>& passbands) {
  s.validate();
  std::vector<Passband> sorted = passbands;
  for (const auto& p : sorted)
    if (!(p.width > 0.0)) throw ConfigError("wss_filter: passband width must be positive");
  std::sort(sorted.begin(), sorted.end(), [](const Passband& a, const Passband& b) { return a.center < b.center; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double hi = sorted[i - 1].center + sorted[i - 1].width / 2.0;
    const double lo = sorted[i].center - sorted[i].width / 2.0;
    if (lo < hi - 1e-9 * std::max(sorted[i].width, sorted[i - 1].width))
      throw ConfigError("wss_filter: overlapping passbands");
  }
  return apply_transfer(s, [&sorted](double f) {
    for (const auto& p : sorted)
      if (f >= p.center - p.width / 2.0 && f < p.center + p.width / 2.0) return cplx(1.0);
    return cplx(0.0);
  });
}

Signal replace_interferers(const Signal& wdm, const ChannelPlan& plan,
                           const std::vector<std::pair<ChannelSpec, Signal>>& fresh, std::size_t span_index,
                           const RoadmConfig& config) {
  if (!config.active) return wdm;
  wdm.validate();
  const double width = config.passband_width;
  const ChannelSpec& cut = plan.cut();
  Signal out = wss_filter(wdm, {{cut.center_offset, width}});
  for (const auto& ch : plan.channels) {
    if (ch.index == cut.index) continue;
    const Signal* copy = nullptr;
    for (const auto& [spec, sig] : fresh)
      if (spec.index == ch.index) copy = &sig;
    if (!copy) throw ConfigError("replace_interferers: no fresh copy for channel " + std::to_string(ch.index));
    if (copy->size() != wdm.size() || copy->sample_rate != wdm.sample_rate || copy->dual() != wdm.dual())
      throw ConfigError("replace_interferers: fresh copy of channel " + std::to_string(ch.index) +
                        " is on a different sample grid");
    const double level = wss_filter(wdm, {{ch.center_offset, width}}).power();
    Signal add_in = config.recondition
                        ? condition_channel(*copy, config.replacement_seed(span_index, ch.index), plan.symbol_rate)
                        : *copy;
    const double p = add_in.power();
    if (p > 0.0) add_in = scaled(add_in, std::sqrt(level / p));
    add_in = frequency_shift(add_in, ch.center_offset);
    add_in = wss_filter(add_in, {{ch.center_offset, width}});
    for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] += add_in.x[i];
    for (std::size_t i = 0; i < out.y.size(); ++i) out.y[i] += add_in.y[i];
  }
  return out;
}

}  // namespace nlin
