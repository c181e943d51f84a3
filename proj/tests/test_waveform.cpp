// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <set>

#include "doctest.h"
#include "nlin/fft.hpp"
#include "nlin/fiber.hpp"
#include "nlin/waveform.hpp"

using namespace nlin;

namespace {

double max_diff(const cvec& a, const cvec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ChannelPlan one_channel_plan() {
  ChannelPlan p;
  ChannelSpec c;
  c.index = 0;
  c.seed = 11;
  c.launch_power = 2e-3;
  p.channels.push_back(c);
  return p;
}

int hamming(unsigned a, unsigned b) { return __builtin_popcount(a ^ b); }

}  // namespace

TEST_SUITE("waveform") {
  TEST_CASE("format names round trip") {
    for (Modulation m : {Modulation::QPSK, Modulation::QAM16, Modulation::GAUSSIAN})
      CHECK(modulation_from_string(to_string(m)) == m);
    CHECK_THROWS(modulation_from_string("8PSK"));
    CHECK(bits_per_symbol(Modulation::QPSK) == 2);
    CHECK(bits_per_symbol(Modulation::QAM16) == 4);
  }

  TEST_CASE("alphabets have unit mean power") {
    for (Modulation m : {Modulation::QPSK, Modulation::QAM16}) {
      const cvec a = alphabet(m);
      CHECK(a.size() == (m == Modulation::QPSK ? 4u : 16u));
      double p = 0.0;
      for (const auto& v : a) p += std::norm(v);
      CHECK(p / static_cast<double>(a.size()) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(alphabet(Modulation::GAUSSIAN).empty());
  }

  TEST_CASE("16QAM map is Gray coded") {
    // nearest neighbours on the grid differ in exactly one bit
    std::vector<std::pair<cplx, unsigned>> pts;
    for (unsigned w = 0; w < 16; ++w) {
      std::vector<std::uint8_t> bits{static_cast<std::uint8_t>((w >> 3) & 1), static_cast<std::uint8_t>((w >> 2) & 1),
                                     static_cast<std::uint8_t>((w >> 1) & 1), static_cast<std::uint8_t>(w & 1)};
      pts.push_back({map_symbols(bits, Modulation::QAM16, 0)[0], w});
    }
    std::set<std::pair<long, long>> distinct;
    for (const auto& [a, wa] : pts) {
      distinct.insert({std::lround(a.real() * std::sqrt(10.0)), std::lround(a.imag() * std::sqrt(10.0))});
      for (const auto& [b, wb] : pts)
        if (std::abs(std::abs(a - b) - 2.0 / std::sqrt(10.0)) < 1e-9) CHECK(hamming(wa, wb) == 1);
    }
    CHECK(distinct.size() == 16u);
    const cvec q = map_symbols({0, 0, 1, 1}, Modulation::QPSK, 0);
    CHECK(std::abs(q[0] - cplx(1.0, 1.0) / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(q[1] - cplx(-1.0, -1.0) / std::sqrt(2.0)) < 1e-15);
  }

  TEST_CASE("random symbols are reproducible") {
    CHECK(max_diff(random_symbols(Modulation::QAM16, 100, 4), random_symbols(Modulation::QAM16, 100, 4)) == 0.0);
    CHECK(max_diff(random_symbols(Modulation::QAM16, 100, 4), random_symbols(Modulation::QAM16, 100, 5)) > 0.0);
    const cvec g = random_symbols(Modulation::GAUSSIAN, 200000, 8);
    double p = 0.0, p4 = 0.0;
    for (const auto& v : g) {
      p += std::norm(v);
      p4 += std::norm(v) * std::norm(v);
    }
    p /= static_cast<double>(g.size());
    p4 /= static_cast<double>(g.size());
    CHECK(p == doctest::Approx(1.0).epsilon(0.01));
    CHECK(p4 == doctest::Approx(2.0).epsilon(0.03));
  }

  TEST_CASE("Zadoff-Chu sequences are CAZAC") {
    for (std::size_t n : {64u, 63u}) {
      const cvec z = cazac_sequence(n, n == 64 ? 1 : 2);
      for (const auto& v : z) CHECK(std::abs(std::abs(v) - 1.0) < 1e-13);
      for (std::size_t lag = 1; lag < n; ++lag) {
        cplx c = 0.0;
        for (std::size_t k = 0; k < n; ++k) c += z[(k + lag) % n] * std::conj(z[k]);
        CHECK(std::abs(c) < 1e-10);
      }
    }
    CHECK_THROWS_AS(cazac_sequence(64, 2), ConfigError);
  }

  TEST_CASE("training header layout") {
    const auto [x, y] = training_header();
    REQUIRE(x.size() == kHeaderLength);
    for (std::size_t b = 0; b < kHeaderBlocks; ++b)
      for (std::size_t i = 0; i < kHeaderBlock; ++i) {
        CHECK(x[b * kHeaderBlock + i] == x[i]);
        CHECK(y[b * kHeaderBlock + i] == (b < 4 ? x[i] : -x[i]));
      }
    const SymbolStreams f = make_symbol_frame(Modulation::QPSK, 2048, 3);
    CHECK(f.x.size() == 2048u);
    CHECK(f.header == kHeaderLength);
    CHECK(f.x[5] == x[5]);
    CHECK_THROWS_AS(make_symbol_frame(Modulation::QPSK, 1000, 3), ConfigError);
  }

  TEST_CASE("raised cosine is Nyquist and the RRC is its root") {
    const double s = 28e9, r = 0.2;
    for (double f = -20e9; f <= 20e9; f += 0.37e9) {
      CHECK(root_raised_cosine(f, s, r) * root_raised_cosine(f, s, r) ==
            doctest::Approx(raised_cosine(f, s, r)).epsilon(1e-14));
      double fold = 0.0;
      for (int k = -2; k <= 2; ++k) fold += raised_cosine(f - k * s, s, r);
      CHECK(fold == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(raised_cosine(0.5 * 1.2 * s + 1.0, s, r) == 0.0);
    CHECK(rrc_impulse(0.0, r) == doctest::Approx(1.0 - r + 4.0 * r / constants::pi));
  }

  TEST_CASE("shaped pulses are band-limited") {
    const cvec sym = random_symbols(Modulation::QAM16, 1024, 2);
    const Signal s = shape_pulses(sym, 0.2, 4, 28e9);
    CHECK(s.size() == 4096u);
    CHECK(s.sample_rate == doctest::Approx(4 * 28e9));
    const Spectrum sp = forward_transform(s);
    double out = 0.0, all = 0.0;
    for (std::size_t k = 0; k < sp.size(); ++k) {
      all += std::norm(sp.x[k]);
      if (std::abs(sp.offset(k)) > 0.6 * 28e9 + sp.bin_spacing) out += std::norm(sp.x[k]);
    }
    CHECK(out < 1e-28 * all);
  }

  TEST_CASE("pre-dispersion equals fiber dispersion and inverts") {
    const ChannelPlan plan = one_channel_plan();
    const TxChannel ch = generate_channel(plan.channels[0], plan, 1536, 2);
    const double d = units::ps_nm_to_si(13000.0);
    const Signal pre = apply_pre_dispersion(ch.signal, d);
    CHECK(pre.power() == doctest::Approx(ch.signal.power()).epsilon(1e-12));
    // D L = d for a fiber of length L
    const double length = 100e3;
    const double beta2 = beta2_from_dispersion(d / length, 1550e-9);
    const Signal fib = apply_transfer(ch.signal, dispersion_transfer(beta2, length));
    CHECK(max_diff(pre.x, fib.x) < 1e-12 * std::sqrt(ch.signal.power()));
    const Signal back = apply_pre_dispersion(pre, -d);
    CHECK(max_diff(back.x, ch.signal.x) < 1e-12);
  }

  TEST_CASE("generated channels carry the launch power") {
    ChannelPlan plan = one_channel_plan();
    plan.channels[0].launch_power = 3e-3;
    const TxChannel ch = generate_channel(plan.channels[0], plan, 1536, 2);
    CHECK(ch.signal.power() == doctest::Approx(3e-3).epsilon(1e-12));
    CHECK(ch.signal.center_frequency == plan.cut_frequency);
    const TxChannel single = generate_channel(plan.channels[0], plan, 1536, 2, false);
    CHECK_FALSE(single.signal.dual());
  }

  TEST_CASE("conditioning is unitary and seeded") {
    const ChannelPlan plan = one_channel_plan();
    const TxChannel ch = generate_channel(plan.channels[0], plan, 1536, 4);
    const Signal a = condition_channel(ch.signal, 77, plan.symbol_rate);
    const Signal b = condition_channel(ch.signal, 77, plan.symbol_rate);
    const Signal c = condition_channel(ch.signal, 78, plan.symbol_rate);
    CHECK(a.power() == doctest::Approx(ch.signal.power()).epsilon(1e-12));
    CHECK(max_diff(a.x, b.x) == 0.0);
    CHECK(max_diff(a.x, c.x) > 0.0);
    const Conditioning k = conditioning_for_seed(77, plan.symbol_rate);
    CHECK(k.delay >= 0.0);
    CHECK(k.delay < 1.0 / plan.symbol_rate);
    // U U^H = I
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const cplx e = k.u[i][0] * std::conj(k.u[j][0]) + k.u[i][1] * std::conj(k.u[j][1]);
        CHECK(std::abs(e - cplx(i == j ? 1.0 : 0.0)) < 1e-12);
      }
  }

  TEST_CASE("multiplex places channels at their offsets") {
    ChannelPlan plan = one_channel_plan();
    ChannelSpec i1 = plan.channels[0];
    i1.index = 1;
    i1.center_offset = 37.5e9;
    i1.seed = 12;
    plan.channels.push_back(i1);
    const TxChannel c0 = generate_channel(plan.channels[0], plan, 1536, 4);
    const TxChannel c1 = generate_channel(plan.channels[1], plan, 1536, 4);
    const Signal wdm = multiplex({{plan.channels[0], c0.signal}, {plan.channels[1], c1.signal}});
    CHECK(wdm.power() == doctest::Approx(4e-3).epsilon(1e-3));
    const Psd p = psd_estimate(wdm, 1e9);
    CHECK(p.integral(37.5e9 - 18e9, 37.5e9 + 18e9) == doctest::Approx(2e-3).epsilon(0.02));
    CHECK(p.integral(-18e9, 18e9) == doctest::Approx(2e-3).epsilon(0.02));
    // at 2 samples/symbol a 37.5 GHz neighbour does not fit
    const TxChannel n0 = generate_channel(plan.channels[0], plan, 1536, 2);
    const TxChannel n1 = generate_channel(plan.channels[1], plan, 1536, 2);
    CHECK_THROWS_AS(multiplex({{plan.channels[0], n0.signal}, {plan.channels[1], n1.signal}}), ConfigError);
    const Signal up = frequency_shift(c0.signal, 10e9);
    CHECK(psd_estimate(up, 1e9).integral(-8e9, 28e9) == doctest::Approx(2e-3).epsilon(0.02));
  }

  TEST_CASE("channel plan validation") {
    ChannelPlan plan = one_channel_plan();
    CHECK_NOTHROW(plan.validate());
    CHECK(plan.cut().index == 0);
    CHECK(plan.find(3) == nullptr);
    plan.channels.push_back(plan.channels[0]);
    CHECK_THROWS_AS(plan.validate(), ConfigError);
  }
}
