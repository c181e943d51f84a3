// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "nlin/roadm.hpp"

using namespace nlin;

namespace {

struct Wdm {
  ChannelPlan plan;
  Signal signal;
  std::vector<std::pair<ChannelSpec, Signal>> fresh;
};

Wdm three_channels() {
  Wdm w;
  for (int i = 0; i < 3; ++i) {
    ChannelSpec c;
    c.index = i;
    c.center_offset = i == 0 ? 0.0 : (i == 1 ? -37.5e9 : 37.5e9);
    c.seed = 100 + i;
    c.launch_power = 2e-3;
    w.plan.channels.push_back(c);
  }
  std::vector<std::pair<ChannelSpec, Signal>> tx;
  for (const auto& c : w.plan.channels) {
    tx.push_back({c, generate_channel(c, w.plan, 1536, 4).signal});
    ChannelSpec f = c;
    f.seed = 200 + c.index;
    w.fresh.push_back({c, generate_channel(f, w.plan, 1536, 4).signal});
  }
  w.signal = multiplex(tx);
  return w;
}

double correlation(const cvec& a, const cvec& b) {
  cplx c = 0.0;
  double pa = 0.0, pb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    c += std::conj(a[i]) * b[i];
    pa += std::norm(a[i]);
    pb += std::norm(b[i]);
  }
  return std::abs(c) / std::sqrt(pa * pb);
}

}  // namespace

TEST_SUITE("roadm") {
  TEST_CASE("rectangular WSS passbands") {
    Signal s;
    s.sample_rate = 64e9;
    s.x.resize(64);
    // tones at bin offsets 2 (2 GHz) and 10 (10 GHz)
    for (std::size_t i = 0; i < 64; ++i)
      s.x[i] = std::polar(1.0, 2.0 * constants::pi * 2.0 * i / 64.0) + std::polar(1.0, 2.0 * constants::pi * 10.0 * i / 64.0);
    const Signal f = wss_filter(s, {{0.0, 8e9}});
    CHECK(f.power() == doctest::Approx(1.0));
    // half-open interval: [c - w/2, c + w/2)
    CHECK(wss_filter(s, {{6e9, 8e9}}).power() == doctest::Approx(1.0));
    CHECK(wss_filter(s, {{0.0, 8e9}, {10e9, 4e9}}).power() == doctest::Approx(2.0));
    CHECK_THROWS_AS(wss_filter(s, {{0.0, 8e9}, {2e9, 8e9}}), ConfigError);
    CHECK_THROWS_AS(wss_filter(s, {{0.0, 0.0}}), ConfigError);
  }

  TEST_CASE("inactive ROADM passes the signal") {
    const Wdm w = three_channels();
    RoadmConfig cfg;
    const Signal out = replace_interferers(w.signal, w.plan, w.fresh, 0, cfg);
    CHECK(out.x == w.signal.x);
  }

  TEST_CASE("replacement keeps the CUT and the interferer powers") {
    const Wdm w = three_channels();
    RoadmConfig cfg;
    cfg.active = true;
    cfg.seed = 5;
    const Signal out = replace_interferers(w.signal, w.plan, w.fresh, 2, cfg);
    const Signal cut_in = wss_filter(w.signal, {{0.0, 37.5e9}});
    const Signal cut_out = wss_filter(out, {{0.0, 37.5e9}});
    for (std::size_t i = 0; i < cut_in.size(); ++i) CHECK(std::abs(cut_in.x[i] - cut_out.x[i]) < 1e-15);
    for (const auto& c : w.plan.channels) {
      if (c.index == 0) continue;
      const Signal before = wss_filter(w.signal, {{c.center_offset, 37.5e9}});
      const Signal after = wss_filter(out, {{c.center_offset, 37.5e9}});
      CHECK(after.power() == doctest::Approx(before.power()).epsilon(1e-12));
      // the data are new
      CHECK(correlation(before.x, after.x) < 0.1);
    }
    // the added copy is the re-conditioned fresh waveform of that slot
    const Signal expected =
        frequency_shift(condition_channel(w.fresh[2].second, cfg.replacement_seed(2, 2), w.plan.symbol_rate), 37.5e9);
    const Signal got = wss_filter(out, {{37.5e9, 37.5e9}});
    CHECK(correlation(expected.x, got.x) > 1.0 - 1e-12);
  }

  TEST_CASE("replacement is seeded per span and channel") {
    const Wdm w = three_channels();
    RoadmConfig cfg;
    cfg.active = true;
    cfg.seed = 5;
    const Signal a = replace_interferers(w.signal, w.plan, w.fresh, 1, cfg);
    const Signal b = replace_interferers(w.signal, w.plan, w.fresh, 1, cfg);
    const Signal c = replace_interferers(w.signal, w.plan, w.fresh, 2, cfg);
    CHECK(a.x == b.x);
    CHECK(a.x != c.x);
    CHECK(cfg.replacement_seed(1, 1) != cfg.replacement_seed(1, 2));
    CHECK(cfg.replacement_seed(1, 1) != cfg.replacement_seed(2, 1));
  }

  TEST_CASE("missing fresh copy is an error") {
    Wdm w = three_channels();
    w.fresh.pop_back();
    RoadmConfig cfg;
    cfg.active = true;
    CHECK_THROWS_AS(replace_interferers(w.signal, w.plan, w.fresh, 0, cfg), ConfigError);
  }
}
